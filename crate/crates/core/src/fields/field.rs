use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::grid::{Boundary, GridSpec};
use crate::algebra::{Mat, Vec3};
use crate::error::{Error, Result};

/// Values that can be sampled on a grid and differenced.
pub trait FieldValue:
    Copy + Debug + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    /// Additive identity with the same shape as `self`.
    fn zero_like(&self) -> Self;
    /// Squared Frobenius/Euclidean magnitude.
    fn norm_sqr(&self) -> f64;
}

impl FieldValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn norm_sqr(&self) -> f64 {
        self * self
    }
}

impl FieldValue for C64 {
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn norm_sqr(&self) -> f64 {
        C64::norm_sqr(self)
    }
}

impl FieldValue for Mat {
    fn zero_like(&self) -> Self {
        Mat::zeros(self.dim())
    }
    fn norm_sqr(&self) -> f64 {
        Mat::norm_sqr(self)
    }
}

impl FieldValue for Vec3 {
    fn zero_like(&self) -> Self {
        Vec3::default()
    }
    fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }
}

/// Finite-difference scheme for first derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Central2,
    Central4,
    OneSided2,
}

impl Scheme {
    fn name(self) -> &'static str {
        match self {
            Scheme::Central2 => "central2",
            Scheme::Central4 => "central4",
            Scheme::OneSided2 => "one-sided2",
        }
    }

    fn min_points(self) -> usize {
        match self {
            Scheme::Central2 | Scheme::OneSided2 => 3,
            Scheme::Central4 => 5,
        }
    }
}

/// One value per grid node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Field<T> {
    spec: GridSpec,
    values: Vec<T>,
}

pub type ScalarField = Field<f64>;
pub type ComplexField = Field<C64>;
pub type MatrixField = Field<Mat>;
pub type VectorField = Field<Vec3>;

impl<T> Field<T> {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<T: Copy> Field<T> {
    pub fn new(spec: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                spec.len()
            )));
        }
        Ok(Field { spec, values })
    }

    pub fn constant(spec: &GridSpec, v: T) -> Self {
        Field {
            spec: spec.clone(),
            values: vec![v; spec.len()],
        }
    }

    /// Samples `f` at every node's coordinates.
    pub fn from_fn(spec: &GridSpec, mut f: impl FnMut(&[f64]) -> T) -> Self {
        let values = (0..spec.len()).map(|n| f(&spec.coords(n))).collect();
        Field {
            spec: spec.clone(),
            values,
        }
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field {
            spec: self.spec.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<U: Copy, V: Copy>(
        &self,
        other: &Field<U>,
        f: impl Fn(T, U) -> V,
    ) -> Result<Field<V>> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        Ok(Field {
            spec: self.spec.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn at(&self, idx: &[usize]) -> T {
        self.values[self.spec.node(idx)]
    }

    /// Values along the line through `node` parallel to `axis`.
    pub fn line(&self, axis: usize, node: usize) -> Vec<T> {
        let s = self.spec.stride(axis);
        let n = self.spec.axes()[axis].count;
        let i = (node / s) % n;
        let start = node - i * s;
        (0..n).map(|k| self.values[start + k * s]).collect()
    }
}

impl<T: FieldValue> Field<T> {
    pub fn linear_combination(&self, a: f64, other: &Field<T>, b: f64) -> Result<Field<T>> {
        self.zip_map(other, |x, y| x * a + y * b)
    }

    /// (L∞, L2) over nodes; L2 is the root-mean-square of node magnitudes so
    /// it is comparable across refinement levels.
    pub fn norms(&self) -> (f64, f64) {
        let mut linf: f64 = 0.0;
        let mut sum = 0.0;
        for v in &self.values {
            let s = v.norm_sqr();
            linf = linf.max(s.sqrt());
            sum += s;
        }
        (linf, (sum / self.values.len().max(1) as f64).sqrt())
    }

    fn apply_lines(&self, axis: usize, op: impl Fn(&[T], &mut [T])) -> Field<T> {
        let s = self.spec.stride(axis);
        let n = self.spec.axes()[axis].count;
        let mut out = self.values.clone();
        let mut buf = Vec::with_capacity(n);
        let mut res = vec![self.values[0].zero_like(); n];
        for start in self.spec.line_starts(axis) {
            buf.clear();
            buf.extend((0..n).map(|k| self.values[start + k * s]));
            op(&buf, &mut res);
            for (k, r) in res.iter().enumerate() {
                out[start + k * s] = *r;
            }
        }
        Field {
            spec: self.spec.clone(),
            values: out,
        }
    }

    fn check_axis(&self, axis: &str, needed: usize, scheme: &'static str) -> Result<usize> {
        let ax = self.spec.axis_index(axis)?;
        let got = self.spec.axes()[ax].count;
        if got < needed {
            return Err(Error::StencilTooWide {
                scheme,
                axis: axis.to_string(),
                needed,
                got,
            });
        }
        Ok(ax)
    }

    /// First derivative along `axis`.
    pub fn partial(&self, axis: &str, scheme: Scheme) -> Result<Field<T>> {
        let ax = self.check_axis(axis, scheme.min_points(), scheme.name())?;
        let a = &self.spec.axes()[ax];
        let periodic = a.boundary == Boundary::Periodic;
        let h = a.spacing;
        Ok(self.apply_lines(ax, |f, out| diff_line(f, out, h, periodic, scheme)))
    }

    /// Second derivative along `axis` (compact 3-point or 5-point stencil).
    pub fn second_partial(&self, axis: &str, scheme: Scheme) -> Result<Field<T>> {
        let needed = match scheme {
            Scheme::Central4 => 6,
            _ => 4,
        };
        let ax = self.check_axis(axis, needed, scheme.name())?;
        let a = &self.spec.axes()[ax];
        let periodic = a.boundary == Boundary::Periodic;
        let h = a.spacing;
        Ok(self.apply_lines(ax, |f, out| second_diff_line(f, out, h, periodic, scheme)))
    }

    /// Cumulative trapezoidal integral along `axis`, zero at the first node.
    pub fn antiderivative(&self, axis: &str) -> Result<Field<T>> {
        let ax = self.spec.axis_index(axis)?;
        let h = self.spec.axes()[ax].spacing;
        Ok(self.apply_lines(ax, |f, out| {
            out[0] = f[0].zero_like();
            for i in 1..f.len() {
                out[i] = out[i - 1] + (f[i - 1] + f[i]) * (0.5 * h);
            }
        }))
    }
}

impl MatrixField {
    pub fn dim(&self) -> usize {
        self.values.first().map_or(2, |m| m.dim())
    }

    /// Node-wise product `self · other`.
    pub fn mul(&self, other: &MatrixField) -> Result<MatrixField> {
        check_dims(self, other)?;
        self.zip_map(other, |a, b| a * b)
    }

    /// Node-wise commutator.
    pub fn commutator(&self, other: &MatrixField) -> Result<MatrixField> {
        check_dims(self, other)?;
        self.zip_map(other, |a, b| a * b - b * a)
    }

    pub fn add(&self, other: &MatrixField) -> Result<MatrixField> {
        check_dims(self, other)?;
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &MatrixField) -> Result<MatrixField> {
        check_dims(self, other)?;
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, c: C64) -> MatrixField {
        self.map(|m| m.scale(c))
    }

    /// Node-wise inverse; fails at the first singular node.
    pub fn inverse(&self) -> Result<MatrixField> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(node, m)| m.inverse().ok_or(Error::Singular { node }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Field {
            spec: self.spec.clone(),
            values,
        })
    }
}

fn check_dims(a: &MatrixField, b: &MatrixField) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

fn diff_line<T: FieldValue>(f: &[T], out: &mut [T], h: f64, periodic: bool, scheme: Scheme) {
    let n = f.len();
    let w = |i: isize| f[(i.rem_euclid(n as isize)) as usize];
    match scheme {
        Scheme::Central2 => {
            let c = 0.5 / h;
            for i in 0..n {
                let ii = i as isize;
                out[i] = if periodic || (i > 0 && i < n - 1) {
                    (w(ii + 1) - w(ii - 1)) * c
                } else if i == 0 {
                    (f[0] * -3.0 + f[1] * 4.0 - f[2]) * c
                } else {
                    (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * c
                };
            }
        }
        Scheme::Central4 => {
            let c = 1.0 / (12.0 * h);
            for i in 0..n {
                let ii = i as isize;
                out[i] = if periodic || (i >= 2 && i + 2 < n) {
                    (w(ii - 2) - w(ii - 1) * 8.0 + w(ii + 1) * 8.0 - w(ii + 2)) * c
                } else if i == 0 {
                    (f[0] * -25.0 + f[1] * 48.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0) * c
                } else if i == 1 {
                    (f[0] * -3.0 - f[1] * 10.0 + f[2] * 18.0 - f[3] * 6.0 + f[4]) * c
                } else if i == n - 2 {
                    (f[n - 1] * 3.0 + f[n - 2] * 10.0 - f[n - 3] * 18.0 + f[n - 4] * 6.0
                        - f[n - 5])
                        * c
                } else {
                    (f[n - 1] * 25.0 - f[n - 2] * 48.0 + f[n - 3] * 36.0 - f[n - 4] * 16.0
                        + f[n - 5] * 3.0)
                        * c
                };
            }
        }
        Scheme::OneSided2 => {
            let c = 0.5 / h;
            for i in 0..n {
                let ii = i as isize;
                out[i] = if periodic || i + 2 < n {
                    (w(ii) * -3.0 + w(ii + 1) * 4.0 - w(ii + 2)) * c
                } else {
                    (f[i] * 3.0 - f[i - 1] * 4.0 + f[i - 2]) * c
                };
            }
        }
    }
}

fn second_diff_line<T: FieldValue>(
    f: &[T],
    out: &mut [T],
    h: f64,
    periodic: bool,
    scheme: Scheme,
) {
    let n = f.len();
    let w = |i: isize| f[(i.rem_euclid(n as isize)) as usize];
    match scheme {
        Scheme::Central4 => {
            let c = 1.0 / (12.0 * h * h);
            for i in 0..n {
                let ii = i as isize;
                out[i] = if periodic || (i >= 2 && i + 2 < n) {
                    (w(ii + 1) * 16.0 + w(ii - 1) * 16.0 - w(ii) * 30.0 - w(ii + 2) - w(ii - 2)) * c
                } else {
                    // mirrored one-sided formulas at the two ends
                    let (g, sgn_i): (Box<dyn Fn(usize) -> T>, usize) = if i < 2 {
                        (Box::new(|k| f[k]), i)
                    } else {
                        (Box::new(|k| f[n - 1 - k]), n - 1 - i)
                    };
                    if sgn_i == 0 {
                        (g(0) * 45.0 - g(1) * 154.0 + g(2) * 214.0 - g(3) * 156.0 + g(4) * 61.0
                            - g(5) * 10.0)
                            * c
                    } else {
                        (g(0) * 10.0 - g(1) * 15.0 - g(2) * 4.0 + g(3) * 14.0 - g(4) * 6.0
                            + g(5))
                            * c
                    }
                };
            }
        }
        _ => {
            let c = 1.0 / (h * h);
            for i in 0..n {
                let ii = i as isize;
                out[i] = if periodic || (i > 0 && i < n - 1) {
                    (w(ii + 1) + w(ii - 1) - w(ii) * 2.0) * c
                } else if i == 0 {
                    (f[0] * 2.0 - f[1] * 5.0 + f[2] * 4.0 - f[3]) * c
                } else {
                    (f[n - 1] * 2.0 - f[n - 2] * 5.0 + f[n - 3] * 4.0 - f[n - 4]) * c
                };
            }
        }
    }
}
