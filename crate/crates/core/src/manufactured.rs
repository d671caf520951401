//! Seeded smooth test data: low-order Fourier sums, group-valued fields built
//! from them, and samplers that place them on grids.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Mat;
use crate::error::{Error, Result};
use crate::fields::{Field, GridSpec, MatrixField, ScalarField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A matrix-valued function of `n` real coordinates, with exact derivatives.
pub trait MatrixSource {
    fn dim(&self) -> usize;
    fn ncoords(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Mat;
    fn deriv(&self, x: &[f64], axis: usize) -> Mat;
}

#[derive(Clone, Debug)]
struct Term {
    coeff: Mat,
    wave: Vec<f64>,
    phase: f64,
}

/// `M(x) = C₀ + Σ_t C_t cos(k_t·x + φ_t)` with integer wave vectors, so the
/// function is 2π-periodic in every coordinate.
#[derive(Clone, Debug)]
pub struct TrigMatrixFn {
    dim: usize,
    ncoords: usize,
    constant: Mat,
    terms: Vec<Term>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryKind {
    Real,
    Complex,
}

impl TrigMatrixFn {
    pub fn zero(dim: usize, ncoords: usize) -> Self {
        TrigMatrixFn {
            dim,
            ncoords,
            constant: Mat::zeros(dim),
            terms: Vec::new(),
        }
    }

    /// `nterms` random modes with wave numbers in `[-kmax, kmax]` per
    /// coordinate (not all zero) and coefficient entries uniform in
    /// `[-1, 1]`, scaled by `amp / nterms`.
    pub fn random<R: Rng>(
        rng: &mut R,
        dim: usize,
        ncoords: usize,
        nterms: usize,
        kmax: i32,
        amp: f64,
        kind: EntryKind,
    ) -> Self {
        let draw = |rng: &mut R| {
            let mut m = Mat::zeros(dim);
            for v in m.entries_mut().iter_mut().take(dim * dim) {
                let re = rng.gen_range(-1.0..1.0);
                let im = match kind {
                    EntryKind::Real => 0.0,
                    EntryKind::Complex => rng.gen_range(-1.0..1.0),
                };
                *v = C64::new(re, im);
            }
            m
        };
        let scale = amp / nterms.max(1) as f64;
        let constant = draw(rng).scale_re(scale);
        let mut terms = Vec::with_capacity(nterms);
        while terms.len() < nterms {
            let wave: Vec<f64> = (0..ncoords)
                .map(|_| rng.gen_range(-kmax..=kmax) as f64)
                .collect();
            if wave.iter().all(|&k| k == 0.0) {
                continue;
            }
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            terms.push(Term {
                coeff: draw(rng).scale_re(scale),
                wave,
                phase,
            });
        }
        TrigMatrixFn {
            dim,
            ncoords,
            constant,
            terms,
        }
    }

    pub fn map_coefficients(&self, f: impl Fn(&Mat) -> Mat) -> Self {
        TrigMatrixFn {
            dim: self.dim,
            ncoords: self.ncoords,
            constant: f(&self.constant),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: f(&t.coeff),
                    ..t.clone()
                })
                .collect(),
        }
    }

    /// `(M − Mᵀ)/2`: real coefficients give an so(n)-valued function.
    pub fn antisymmetrized(&self) -> Self {
        self.map_coefficients(|c| (*c - c.transpose()).scale_re(0.5))
    }

    /// `(M − M†)/2`.
    pub fn anti_hermitian(&self) -> Self {
        self.map_coefficients(|c| (*c - c.adjoint()).scale_re(0.5))
    }

    /// Removes the trace of every coefficient.
    pub fn traceless(&self) -> Self {
        self.map_coefficients(|c| {
            let t = c.trace() / self.dim as f64;
            *c - Mat::identity(self.dim).scale(t)
        })
    }

    pub fn with_constant(mut self, c: Mat) -> Self {
        self.constant = c;
        self
    }

    pub fn second_deriv(&self, x: &[f64], a: usize, b: usize) -> Mat {
        let mut out = Mat::zeros(self.dim);
        for t in &self.terms {
            let ph = dotw(&t.wave, x) + t.phase;
            out += t.coeff.scale_re(-t.wave[a] * t.wave[b] * ph.cos());
        }
        out
    }

    pub fn third_deriv(&self, x: &[f64], a: usize, b: usize, c: usize) -> Mat {
        let mut out = Mat::zeros(self.dim);
        for t in &self.terms {
            let ph = dotw(&t.wave, x) + t.phase;
            out += t.coeff.scale_re(t.wave[a] * t.wave[b] * t.wave[c] * ph.sin());
        }
        out
    }
}

fn dotw(k: &[f64], x: &[f64]) -> f64 {
    k.iter().zip(x).map(|(a, b)| a * b).sum()
}

impl MatrixSource for TrigMatrixFn {
    fn dim(&self) -> usize {
        self.dim
    }
    fn ncoords(&self) -> usize {
        self.ncoords
    }
    fn eval(&self, x: &[f64]) -> Mat {
        let mut out = self.constant;
        for t in &self.terms {
            out += t.coeff.scale_re((dotw(&t.wave, x) + t.phase).cos());
        }
        out
    }
    fn deriv(&self, x: &[f64], axis: usize) -> Mat {
        let mut out = Mat::zeros(self.dim);
        for t in &self.terms {
            let ph = dotw(&t.wave, x) + t.phase;
            out += t.coeff.scale_re(-t.wave[axis] * ph.sin());
        }
        out
    }
}

/// Scalar analogue of [`TrigMatrixFn`].
#[derive(Clone, Debug)]
pub struct TrigScalarFn {
    constant: f64,
    terms: Vec<(f64, Vec<f64>, f64)>,
}

impl TrigScalarFn {
    pub fn random<R: Rng>(rng: &mut R, ncoords: usize, nterms: usize, kmax: i32, amp: f64) -> Self {
        let scale = amp / nterms.max(1) as f64;
        let constant = rng.gen_range(-1.0..1.0) * scale;
        let mut terms = Vec::new();
        while terms.len() < nterms {
            let wave: Vec<f64> = (0..ncoords)
                .map(|_| rng.gen_range(-kmax..=kmax) as f64)
                .collect();
            if wave.iter().all(|&k| k == 0.0) {
                continue;
            }
            terms.push((
                rng.gen_range(-1.0..1.0) * scale,
                wave,
                rng.gen_range(0.0..std::f64::consts::TAU),
            ));
        }
        TrigScalarFn { constant, terms }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|(c, k, p)| c * (dotw(k, x) + p).cos())
                .sum::<f64>()
    }

    pub fn deriv(&self, x: &[f64], axis: usize) -> f64 {
        self.terms
            .iter()
            .map(|(c, k, p)| -c * k[axis] * (dotw(k, x) + p).sin())
            .sum()
    }

    pub fn second_deriv(&self, x: &[f64], a: usize, b: usize) -> f64 {
        self.terms
            .iter()
            .map(|(c, k, p)| -c * k[a] * k[b] * (dotw(k, x) + p).cos())
            .sum()
    }
}

/// How a smooth invertible group element is built from a Fourier sum `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    /// `g = I + εK`, invertible for small ε.
    NearIdentity,
    /// `g = (I − K)⁻¹(I + K)`: orthogonal for real antisymmetric `K`,
    /// unitary for anti-Hermitian `K`.
    Cayley,
}

/// Smooth pointwise-invertible matrix function `g(x)` with exact derivatives.
#[derive(Clone, Debug)]
pub struct GroupField {
    pub kind: GroupKind,
    pub generator: TrigMatrixFn,
    pub epsilon: f64,
}

impl GroupField {
    /// Random `g = I + εK` with complex entries.
    pub fn near_identity(seed: u64, dim: usize, ncoords: usize, epsilon: f64) -> Self {
        let mut r = rng(seed);
        GroupField {
            kind: GroupKind::NearIdentity,
            generator: TrigMatrixFn::random(&mut r, dim, ncoords, 4, 1, 1.0, EntryKind::Complex),
            epsilon,
        }
    }

    /// Random unitary `g` (Cayley transform of an anti-Hermitian sum).
    pub fn unitary(seed: u64, dim: usize, ncoords: usize, amp: f64) -> Self {
        let mut r = rng(seed);
        GroupField {
            kind: GroupKind::Cayley,
            generator: TrigMatrixFn::random(&mut r, dim, ncoords, 4, 1, amp, EntryKind::Complex)
                .anti_hermitian(),
            epsilon: 1.0,
        }
    }

    /// Random real orthogonal `g`.
    pub fn orthogonal(seed: u64, dim: usize, ncoords: usize, amp: f64) -> Self {
        let mut r = rng(seed);
        GroupField {
            kind: GroupKind::Cayley,
            generator: TrigMatrixFn::random(&mut r, dim, ncoords, 4, 1, amp, EntryKind::Real)
                .antisymmetrized(),
            epsilon: 1.0,
        }
    }

    fn k(&self, x: &[f64]) -> Mat {
        self.generator.eval(x).scale_re(self.epsilon)
    }

    fn dk(&self, x: &[f64], axis: usize) -> Mat {
        self.generator.deriv(x, axis).scale_re(self.epsilon)
    }

    pub fn inverse_at(&self, x: &[f64]) -> Result<Mat> {
        self.eval(x)
            .inverse()
            .ok_or_else(|| Error::Invalid(format!("group field singular at {x:?}")))
    }

    /// `g_axis g⁻¹`, the flat connection whose transport is `g`.
    pub fn connection(&self, x: &[f64], axis: usize) -> Mat {
        let g = self.eval(x);
        let gi = g.inverse().expect("group field must be invertible");
        self.deriv(x, axis) * gi
    }
}

impl MatrixSource for GroupField {
    fn dim(&self) -> usize {
        self.generator.dim()
    }
    fn ncoords(&self) -> usize {
        self.generator.ncoords()
    }
    fn eval(&self, x: &[f64]) -> Mat {
        let id = Mat::identity(self.dim());
        let k = self.k(x);
        match self.kind {
            GroupKind::NearIdentity => id + k,
            GroupKind::Cayley => {
                (id - k).inverse().expect("Cayley generator has eigenvalue 1") * (id + k)
            }
        }
    }
    fn deriv(&self, x: &[f64], axis: usize) -> Mat {
        let dk = self.dk(x, axis);
        match self.kind {
            GroupKind::NearIdentity => dk,
            GroupKind::Cayley => {
                let id = Mat::identity(self.dim());
                let inv = (id - self.k(x)).inverse().expect("Cayley generator has eigenvalue 1");
                inv * dk * (id + self.eval(x))
            }
        }
    }
}

/// Maps grid axes onto source coordinates. Source coordinates not covered by
/// the grid are held at `base`.
#[derive(Clone, Debug)]
pub struct Placement {
    pub coord_names: Vec<String>,
    pub base: Vec<f64>,
}

impl Placement {
    pub fn new(coord_names: &[&str], base: &[f64]) -> Self {
        assert_eq!(coord_names.len(), base.len());
        Placement {
            coord_names: coord_names.iter().map(|s| s.to_string()).collect(),
            base: base.to_vec(),
        }
    }

    /// All coordinates at zero.
    pub fn origin(coord_names: &[&str]) -> Self {
        Placement::new(coord_names, &vec![0.0; coord_names.len()])
    }

    pub fn coord_index(&self, name: &str) -> Result<usize> {
        self.coord_names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    fn axis_map(&self, spec: &GridSpec) -> Result<Vec<usize>> {
        spec.names().iter().map(|n| self.coord_index(n)).collect()
    }

    /// Samples `f(point)` on every node, where `point` is the full coordinate
    /// vector of the source.
    pub fn sample<T: Copy>(&self, spec: &GridSpec, f: impl Fn(&[f64]) -> T) -> Result<Field<T>> {
        let map = self.axis_map(spec)?;
        let mut p = self.base.clone();
        Ok(Field::from_fn(spec, |c| {
            for (k, &i) in map.iter().enumerate() {
                p[i] = c[k];
            }
            f(&p)
        }))
    }

    pub fn sample_source(&self, spec: &GridSpec, s: &dyn MatrixSource) -> Result<MatrixField> {
        self.sample(spec, |p| s.eval(p))
    }

    pub fn sample_deriv(
        &self,
        spec: &GridSpec,
        s: &dyn MatrixSource,
        coord: &str,
    ) -> Result<MatrixField> {
        let a = self.coord_index(coord)?;
        self.sample(spec, |p| s.deriv(p, a))
    }

    /// `g_coord g⁻¹` sampled on the grid.
    pub fn sample_connection(&self, spec: &GridSpec, g: &GroupField, coord: &str) -> Result<MatrixField> {
        let a = self.coord_index(coord)?;
        self.sample(spec, |p| g.connection(p, a))
    }

    pub fn sample_scalar(&self, spec: &GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<ScalarField> {
        self.sample(spec, f)
    }
}
