//! Small complex matrices (dimension 2 or 3) and the fixed layouts that map
//! curvature data onto them.
//!
//! Every connection matrix in the crate is a [`Mat`]: the 3×3 frame
//! generators built by [`so3_from_triple`], the traceless 2×2 forms built by
//! [`su2_from_triple`], and the spin matrix of [`spin_matrix`].

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Sign of the first trihedral vector's square, `e₁·e₁ = β`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Sign::Plus)
        } else if v == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(Error::Invalid(format!("beta must be +1 or -1, got {v}")))
        }
    }
}

/// Dense row-major complex matrix of dimension 2 or 3.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat {
    dim: usize,
    data: [C64; 9],
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "matrix dimension must be 2 or 3");
        Mat {
            dim,
            data: [C64::new(0.0, 0.0); 9],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Mat::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from `dim*dim` complex entries in row-major order.
    pub fn from_entries(dim: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim²");
        let mut m = Mat::zeros(dim);
        m.data[..dim * dim].copy_from_slice(entries);
        m
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim²");
        let mut m = Mat::zeros(dim);
        for (d, &e) in m.data.iter_mut().zip(entries) {
            *d = C64::new(e, 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn entries_mut(&mut self) -> &mut [C64] {
        let n = self.dim * self.dim;
        &mut self.data[..n]
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut out = *self;
        for v in out.entries_mut() {
            *v = f(*v);
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| v * c)
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Mat::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().map(|v| v.conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn det(&self) -> C64 {
        let g = |i, j| self.get(i, j);
        match self.dim {
            2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
            _ => {
                g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                    - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                    + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
            }
        }
    }

    /// Inverse by adjugate; `None` when the determinant is negligible relative
    /// to the matrix scale.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        let scale = self.frobenius().powi(self.dim as i32);
        if !det.is_finite() || det.norm() <= 1e-13 * scale || det.norm() == 0.0 {
            return None;
        }
        let g = |i, j| self.get(i, j);
        let mut adj = Mat::zeros(self.dim);
        match self.dim {
            2 => {
                adj.set(0, 0, g(1, 1));
                adj.set(0, 1, -g(0, 1));
                adj.set(1, 0, -g(1, 0));
                adj.set(1, 1, g(0, 0));
            }
            _ => {
                for i in 0..3 {
                    for j in 0..3 {
                        let (r0, r1) = match j {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let (c0, c1) = match i {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let minor = g(r0, c0) * g(r1, c1) - g(r0, c1) * g(r1, c0);
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        adj.set(i, j, minor * sign);
                    }
                }
            }
        }
        Some(adj.scale(det.inv()))
    }

    pub fn frobenius(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries().iter().map(|v| v.norm_sqr()).sum()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|v| v.is_finite())
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.entries().iter().all(|v| v.im.abs() <= tol)
    }

    /// Real part of an entry, for matrices known to be real (frames).
    #[inline]
    pub fn re(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).re
    }

    pub fn row_re(&self, i: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (j, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = self.re(i, j);
        }
        out
    }

    /// Eigenvalues: closed form in 2D, complex Schur form in 3D.
    pub fn eigenvalues(&self) -> Vec<C64> {
        match self.dim {
            2 => {
                let tr = self.trace();
                let det = self.det();
                let disc = (tr * tr * 0.25 - det).sqrt();
                vec![tr * 0.5 + disc, tr * 0.5 - disc]
            }
            _ => {
                let m = nalgebra::Matrix3::from_fn(|i, j| self.get(i, j));
                let schur = nalgebra::Schur::new(m);
                let (_, t) = schur.unpack();
                (0..3).map(|i| t[(i, i)]).collect()
            }
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    pub fn expm(&self) -> Self {
        let norm = self.norm1();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let b = self.scale_re(0.5f64.powi(squarings as i32));
        let mut term = Mat::identity(self.dim);
        let mut sum = term;
        for k in 1..=18 {
            term = (term * b).scale_re(1.0 / k as f64);
            sum += term;
            if term.norm1() < 1e-18 * sum.norm1() {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    /// Exact rotation `exp(h A)` for a real antisymmetric generator (Rodrigues
    /// in 3D, planar rotation in 2D). Returns `None` if `A` is not real
    /// antisymmetric to `tol`.
    pub fn rotation_exp(&self, tol: f64) -> Option<Self> {
        if !self.is_real(tol) || (*self + self.transpose()).frobenius() > tol {
            return None;
        }
        match self.dim {
            2 => {
                let a = self.re(0, 1);
                let (s, c) = a.sin_cos();
                Some(Mat::from_real(2, &[c, s, -s, c]))
            }
            _ => {
                let theta = (self.norm_sqr() * 0.5).sqrt();
                let k = *self;
                let k2 = k * k;
                let (a, b) = if theta < 1e-8 {
                    (1.0 - theta * theta / 6.0, 0.5 - theta * theta / 24.0)
                } else {
                    (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
                };
                let mut r = Mat::identity(3) + k.scale_re(a) + k2.scale_re(b);
                for v in r.entries_mut() {
                    v.im = 0.0;
                }
                Some(r)
            }
        }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}[", self.dim)?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let v = self.get(i, j);
                write!(f, "{}{:+}i", v.re, v.im)?;
            }
        }
        write!(f, "]")
    }
}

impl Add for Mat {
    type Output = Mat;
    fn add(mut self, rhs: Mat) -> Mat {
        self += rhs;
        self
    }
}

impl AddAssign for Mat {
    fn add_assign(&mut self, rhs: Mat) {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
    }
}

impl Sub for Mat {
    type Output = Mat;
    fn sub(mut self, rhs: Mat) -> Mat {
        self -= rhs;
        self
    }
}

impl SubAssign for Mat {
    fn sub_assign(&mut self, rhs: Mat) {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
    }
}

impl Neg for Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.map(|v| -v)
    }
}

impl Mul for Mat {
    type Output = Mat;
    fn mul(self, rhs: Mat) -> Mat {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Mul<f64> for Mat {
    type Output = Mat;
    fn mul(self, rhs: f64) -> Mat {
        self.scale_re(rhs)
    }
}

impl Mul<C64> for Mat {
    type Output = Mat;
    fn mul(self, rhs: C64) -> Mat {
        self.scale(rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct MatRepr {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatRepr {
            dim: self.dim,
            entries: self.entries().iter().map(|v| [v.re, v.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatRepr::deserialize(d)?;
        if !(r.dim == 2 || r.dim == 3) || r.entries.len() != r.dim * r.dim {
            return Err(serde::de::Error::custom("matrix must be 2x2 or 3x3"));
        }
        let entries: Vec<C64> = r.entries.iter().map(|e| C64::new(e[0], e[1])).collect();
        Ok(Mat::from_entries(r.dim, &entries))
    }
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &Mat, b: &Mat) -> Result<Mat> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch(a.dim, b.dim));
    }
    Ok(*a * *b - *b * *a)
}

/// Curvature data of one trihedral point: normal curvature `k`, geodesic
/// curvature `sigma`, geodesic torsion `tau`, and the metric sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTriple {
    pub k: f64,
    pub sigma: f64,
    pub tau: f64,
    pub beta: Sign,
}

impl CurvatureTriple {
    pub fn new(k: f64, sigma: f64, tau: f64, beta: Sign) -> Self {
        CurvatureTriple { k, sigma, tau, beta }
    }
}

/// Coefficients `(c1, c2, c3)` of the y/z/t frame generators, e.g. `(m1, m2, m3)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTriple {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CoefficientTriple {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        CoefficientTriple { c1, c2, c3 }
    }

    /// Slot-equivalent curvature triple: `c3` sits where `k` does, `c2` where
    /// `sigma` does, `c1` where `tau` does.
    pub fn as_curvature(&self, beta: Sign) -> CurvatureTriple {
        CurvatureTriple::new(self.c3, self.c2, self.c1, beta)
    }
}

/// `[0, k, −σ; −βk, 0, τ; βσ, −τ, 0]`.
pub fn so3_from_triple(t: &CurvatureTriple) -> Mat {
    let b = t.beta.value();
    Mat::from_real(
        3,
        &[
            0.0,
            t.k,
            -t.sigma,
            -b * t.k,
            0.0,
            t.tau,
            b * t.sigma,
            -t.tau,
            0.0,
        ],
    )
}

pub fn so3_from_coefficients(c: &CoefficientTriple, beta: Sign) -> Mat {
    so3_from_triple(&c.as_curvature(beta))
}

/// Planar generator `[0, k; −βk, 0]`.
pub fn plane_generator(k: f64, beta: Sign) -> Mat {
    Mat::from_real(2, &[0.0, k, -beta.value() * k, 0.0])
}

/// Recovers `(k, σ, τ)` from a matrix with the [`so3_from_triple`] layout.
pub fn triple_from_so3(m: &Mat, beta: Sign) -> CurvatureTriple {
    CurvatureTriple::new(m.re(0, 1), -m.re(0, 2), m.re(1, 2), beta)
}

/// `(1/2i) [a3, a1 − i a2; a1 + i a2, −a3]` with `(a1, a2, a3) = (k, σ, τ)`.
/// Complex inputs are accepted so that spectral reductions with complex
/// curvatures go through the same layout.
pub fn su2_from_triple_c(k: C64, sigma: C64, tau: C64) -> Mat {
    let f = (I * 2.0).inv();
    Mat::from_entries(
        2,
        &[tau * f, (k - I * sigma) * f, (k + I * sigma) * f, -tau * f],
    )
}

pub fn su2_from_triple(k: f64, sigma: f64, tau: f64) -> Mat {
    su2_from_triple_c(k.into(), sigma.into(), tau.into())
}

/// Inverse of [`su2_from_triple_c`] on traceless 2×2 matrices.
pub fn triple_from_su2(m: &Mat) -> [C64; 3] {
    let two_i = I * 2.0;
    let tau = m.get(0, 0) * two_i;
    let a = m.get(0, 1) * two_i; // k − iσ
    let b = m.get(1, 0) * two_i; // k + iσ
    [(a + b) * 0.5, (b - a) * 0.5 / I, tau]
}

/// `S = [S3, S1 − iS2; S1 + iS2, −S3]`, the Pauli-basis spin matrix.
pub fn spin_matrix(s1: f64, s2: f64, s3: f64) -> Mat {
    Mat::from_entries(
        2,
        &[
            C64::new(s3, 0.0),
            C64::new(s1, -s2),
            C64::new(s1, s2),
            C64::new(-s3, 0.0),
        ],
    )
}

/// Inverse of [`spin_matrix`] (real parts of the Pauli coordinates).
pub fn spin_vector(m: &Mat) -> [f64; 3] {
    let s1 = (m.get(0, 1) + m.get(1, 0)) * 0.5;
    let s2 = (m.get(1, 0) - m.get(0, 1)) * 0.5 / I;
    let s3 = (m.get(0, 0) - m.get(1, 1)) * 0.5;
    [s1.re, s2.re, s3.re]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Real 3-vector with the arithmetic needed to live in a field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Vec3([a, b, c])
    }

    pub fn dot(&self, o: &Vec3) -> f64 {
        dot(self.0, o.0)
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3(cross(self.0, o.0))
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn spin_matrix(&self) -> Mat {
        spin_matrix(self.0[0], self.0[1], self.0[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, c: f64) -> Vec3 {
        Vec3([self.0[0] * c, self.0[1] * c, self.0[2] * c])
    }
}
