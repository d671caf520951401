//! Uniform grids, fields sampled on them and finite-difference calculus.

mod field;
mod grid;
pub mod io;
mod report;

pub use field::{
    ComplexField, Field, FieldValue, MatrixField, ScalarField, Scheme, VectorField,
};
pub use grid::{Axis, Boundary, GridSpec};
pub use report::{ConvergenceTable, ResidualEntry, ResidualReport};

use crate::error::Result;

pub fn partial<T: FieldValue>(f: &Field<T>, axis: &str, scheme: Scheme) -> Result<Field<T>> {
    f.partial(axis, scheme)
}

pub fn antiderivative<T: FieldValue>(f: &Field<T>, axis: &str) -> Result<Field<T>> {
    f.antiderivative(axis)
}

pub fn field_norms<T: FieldValue>(f: &Field<T>) -> (f64, f64) {
    f.norms()
}
