pub mod algebra;
pub mod error;
pub mod fields;
pub mod frames;
pub mod manufactured;
pub mod reductions;
pub mod sdym;
pub mod spin;
pub mod zerocurvature;

pub use algebra::{Mat, Sign, Vec3};
pub use error::{Error, Result};
