//! Named specializations of the zero-curvature system and the coordinate and
//! algebraic maps between frames, the multi-axis systems and self-dual
//! Yang–Mills.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;

use crate::algebra::{su2_from_triple_c, Mat};
use crate::error::{Error, Result};
use crate::fields::{ComplexField, Field, GridSpec, MatrixField, ResidualReport, ScalarField, Scheme};
use crate::sdym::{sd_residual_with, strength_component, DerivOp, GaugePotential, PotentialSource, XI};
use crate::zerocurvature::{
    eval_expansion, mmlxviii_residual, zc_residual_with, Coefficient, ConnectionSet, SpectralExpansion, Weight,
};

const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const XYZT: [&str; 4] = ["x", "y", "z", "t"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionKind {
    /// λ-free curve/spin form: `U` built directly from `(k, σ, τ)`.
    GweCmpe,
    /// `k = i(p+q)`, `σ = p − q`, `τ = −2λ`.
    ZsAkns,
    /// `k = iλ(p+q)`, `σ = λ(p − q)`, `τ = −2λ`.
    Knwki,
    /// `U = u/(1−λ)`, `V = v/(1+λ)`.
    ChiralField,
    /// `(k, σ, τ)` restricted to the sphere `k² + σ² + τ² = n²`.
    SpinConstraint,
}

/// Input fields of a reduction. Which variant is required depends on the
/// kind; see [`named_connection`].
#[derive(Clone, Debug)]
pub enum ReductionInputs {
    Triple {
        k: ScalarField,
        sigma: ScalarField,
        tau: ScalarField,
    },
    Potentials {
        p: ComplexField,
        q: ComplexField,
    },
    Chiral {
        u: MatrixField,
        v: MatrixField,
    },
    Spin {
        k: ScalarField,
        sigma: ScalarField,
        tau: ScalarField,
        n: f64,
    },
}

/// Relative tolerance of the spin constraint accepted by [`named_connection`].
pub const SPIN_CONSTRAINT_TOL: f64 = 1e-8;

/// Assembles the members of the connection that the reduction specifies:
/// `x` only for the spectral problems, `x` and `t` for the chiral field.
pub fn named_connection(kind: ReductionKind, inputs: &ReductionInputs, lambda: C64) -> Result<ConnectionSet> {
    let missing = |what: &str| Error::Missing(format!("{what} required by {kind:?}"));
    match kind {
        ReductionKind::GweCmpe => match inputs {
            ReductionInputs::Triple { k, sigma, tau } => {
                let exp = SpectralExpansion {
                    k: vec![(Weight::Power(0), Coefficient::Real(k.clone()))],
                    sigma: vec![(Weight::Power(0), Coefficient::Real(sigma.clone()))],
                    tau: vec![(Weight::Power(0), Coefficient::Real(tau.clone()))],
                    omega: vec![],
                };
                ConnectionSet::new(vec![("x", assemble(&exp, lambda)?)])
            }
            _ => Err(missing("curvature triple (k, sigma, tau)")),
        },
        ReductionKind::ZsAkns | ReductionKind::Knwki => match inputs {
            ReductionInputs::Potentials { p, q } => {
                if p.spec() != q.spec() {
                    return Err(Error::GridMismatch);
                }
                let j = if kind == ReductionKind::ZsAkns { 0 } else { 1 };
                let k = p.zip_map(q, |a, b| I * (a + b))?;
                let s = p.zip_map(q, |a, b| a - b)?;
                let t = p.map(|_| C64::new(-2.0, 0.0));
                let exp = SpectralExpansion {
                    k: vec![(Weight::Power(j), Coefficient::Complex(k))],
                    sigma: vec![(Weight::Power(j), Coefficient::Complex(s))],
                    tau: vec![(Weight::Power(1), Coefficient::Complex(t))],
                    omega: vec![],
                };
                ConnectionSet::new(vec![("x", assemble(&exp, lambda)?)])
            }
            _ => Err(missing("potentials (p, q)")),
        },
        ReductionKind::ChiralField => match inputs {
            ReductionInputs::Chiral { u, v } => {
                let (wu, wv) = chiral_weights(lambda)?;
                ConnectionSet::new(vec![("x", u.scale(wu)), ("t", v.scale(wv))])
            }
            _ => Err(missing("chiral fields (u, v)")),
        },
        ReductionKind::SpinConstraint => match inputs {
            ReductionInputs::Spin { k, sigma, tau, n } => {
                let dev = spin_constraint_deviation(k, sigma, tau, *n)?;
                if dev > SPIN_CONSTRAINT_TOL {
                    return Err(Error::Constraint(dev));
                }
                named_connection(
                    ReductionKind::GweCmpe,
                    &ReductionInputs::Triple {
                        k: k.clone(),
                        sigma: sigma.clone(),
                        tau: tau.clone(),
                    },
                    lambda,
                )
            }
            _ => Err(missing("curvature triple and n")),
        },
    }
}

fn assemble(exp: &SpectralExpansion, lambda: C64) -> Result<MatrixField> {
    let v = eval_expansion(exp, lambda)?;
    let (k, s, t) = match (v.k, v.sigma, v.tau) {
        (Some(k), Some(s), Some(t)) => (k, s, t),
        _ => return Err(Error::Missing("k, sigma and tau terms".into())),
    };
    k.zip_map(&s, |a, b| (a, b))?
        .zip_map(&t, |(a, b), c| su2_from_triple_c(a, b, c))
}

/// `1/(1−λ)` and `1/(1+λ)`; poles at `λ = ±1`.
fn chiral_weights(lambda: C64) -> Result<(C64, C64)> {
    let one = C64::new(1.0, 0.0);
    let wu = Weight::Rational { num: vec![one], den: vec![one, -one] }.eval(lambda)?;
    let wv = Weight::Rational { num: vec![one], den: vec![one, one] }.eval(lambda)?;
    Ok((wu, wv))
}

/// Largest `|k² + σ² + τ² − n²| / n²` over the grid.
pub fn spin_constraint_deviation(k: &ScalarField, sigma: &ScalarField, tau: &ScalarField, n: f64) -> Result<f64> {
    if k.spec() != sigma.spec() || k.spec() != tau.spec() {
        return Err(Error::GridMismatch);
    }
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Invalid(format!("n must be positive, got {n}")));
    }
    let n2 = n * n;
    Ok(k.values()
        .iter()
        .zip(sigma.values())
        .zip(tau.values())
        .map(|((a, b), c)| (a * a + b * b + c * c - n2).abs() / n2)
        .fold(0.0, f64::max))
}

pub fn satisfies_spin_constraint(k: &ScalarField, sigma: &ScalarField, tau: &ScalarField, n: f64, tol: f64) -> bool {
    spin_constraint_deviation(k, sigma, tau, n).is_ok_and(|d| d <= tol)
}

/// Zero-curvature residual of `U = u/(1−λ)`, `V = v/(1+λ)` on an `(x, t)`
/// grid, alongside the two chiral-field equations
/// `u_t + ½[u,v]` and `v_x − ½[u,v]`.
pub fn chiral_field_residual(u: &MatrixField, v: &MatrixField, lambda: C64) -> Result<ResidualReport> {
    chiral_field_residual_with(u, v, lambda, Scheme::Central2)
}

pub fn chiral_field_residual_with(
    u: &MatrixField,
    v: &MatrixField,
    lambda: C64,
    scheme: Scheme,
) -> Result<ResidualReport> {
    let (wu, wv) = chiral_weights(lambda)?;
    let zc = zc_residual_with(&u.scale(wu), &v.scale(wv), "x", "t", scheme)?;
    let half = u.commutator(v)?.scale(C64::new(0.5, 0.0));
    let r1 = u.partial("t", scheme)?.add(&half)?;
    let r2 = v.partial("x", scheme)?.sub(&half)?;
    let mut rep = ResidualReport::new();
    rep.push("zc(lambda)", zc.norms());
    rep.push("u_t+[u,v]/2", r1.norms());
    rep.push("v_x-[u,v]/2", r2.norms());
    Ok(rep)
}

/// Solves `u_t = −½[u,v]`, `v_x = ½[u,v]` on a closed `(x, t)` grid from
/// `u(x, t₀)` and `v(x₀, t)`. Each equation is integrated along its own
/// characteristic by the trapezoid rule; the two unknowns at a node are
/// coupled through `[u,v]` and resolved by fixed-point iteration.
pub fn solve_chiral(
    spec: &GridSpec,
    u0: &dyn Fn(f64) -> Mat,
    v0: &dyn Fn(f64) -> Mat,
) -> Result<(MatrixField, MatrixField)> {
    if spec.ndim() != 2 || spec.names() != ["x", "t"] {
        return Err(Error::InvalidGrid("chiral solver needs axes (x, t)".into()));
    }
    let (ax, at) = (&spec.axes()[0], &spec.axes()[1]);
    if ax.is_periodic() || at.is_periodic() {
        return Err(Error::InvalidGrid("chiral solver needs closed axes".into()));
    }
    let (nx, nt, h, k) = (ax.count, at.count, ax.spacing, at.spacing);
    let dim = u0(ax.coord(0)).dim();
    let mut u = vec![Mat::zeros(dim); nx * nt];
    let mut v = vec![Mat::zeros(dim); nx * nt];
    let br = |a: &Mat, b: &Mat| *a * *b - *b * *a;
    for i in 0..nx {
        for j in 0..nt {
            let n = i * nt + j;
            if j == 0 {
                u[n] = u0(ax.coord(i));
            }
            if i == 0 {
                v[n] = v0(at.coord(j));
            }
            if i == 0 && j == 0 {
                continue;
            }
            let (um, cu) = if j > 0 {
                (u[n - 1], br(&u[n - 1], &v[n - 1]))
            } else {
                (u[n], Mat::zeros(dim))
            };
            let (vm, cv) = if i > 0 {
                (v[n - nt], br(&u[n - nt], &v[n - nt]))
            } else {
                (v[n], Mat::zeros(dim))
            };
            let (mut un, mut vn) = (um, vm);
            let mut converged = false;
            for _ in 0..200 {
                let c = br(&un, &vn);
                let nu = if j > 0 { um - (cu + c) * (k / 4.0) } else { un };
                let nv = if i > 0 { vm + (cv + c) * (h / 4.0) } else { vn };
                let d = (nu - un).frobenius() + (nv - vn).frobenius();
                un = nu;
                vn = nv;
                if !un.is_finite() || !vn.is_finite() {
                    break;
                }
                if d <= 1e-15 * (1.0 + un.frobenius() + vn.frobenius()) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NoConvergence(format!("chiral node ({i}, {j})")));
            }
            u[n] = un;
            v[n] = vn;
        }
    }
    Ok((Field::new(spec.clone(), u)?, Field::new(spec.clone(), v)?))
}

type MapFn = Arc<dyn Fn(&[f64; 4]) -> [f64; 4] + Send + Sync>;
type JacFn = Arc<dyn Fn(&[f64; 4]) -> Matrix4<f64> + Send + Sync>;

/// `ξ = f(x, y, z, t)`. The Jacobian is `J_{ji} = ∂ξ_j/∂x_i`, so the
/// connection coefficients are `b_{ij} = J_{ji}`.
#[derive(Clone)]
pub enum CoordinateMap {
    Linear(Matrix4<f64>),
    Nonlinear { map: MapFn, jacobian: JacFn },
}

impl fmt::Debug for CoordinateMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordinateMap::Linear(h) => f.debug_tuple("Linear").field(h).finish(),
            CoordinateMap::Nonlinear { .. } => f.write_str("Nonlinear"),
        }
    }
}

impl CoordinateMap {
    /// Linear map `ξ = H x`; rejects numerically singular `H`.
    pub fn linear(h: Matrix4<f64>) -> Result<Self> {
        let cond = h.norm() * h.try_inverse().map(|m| m.norm()).unwrap_or(f64::INFINITY);
        if !(cond.is_finite() && cond < 1e12) {
            return Err(Error::Invalid(format!("H is singular (condition {cond:.3e})")));
        }
        Ok(CoordinateMap::Linear(h))
    }

    pub fn nonlinear(
        map: impl Fn(&[f64; 4]) -> [f64; 4] + Send + Sync + 'static,
        jacobian: impl Fn(&[f64; 4]) -> Matrix4<f64> + Send + Sync + 'static,
    ) -> Self {
        CoordinateMap::Nonlinear {
            map: Arc::new(map),
            jacobian: Arc::new(jacobian),
        }
    }

    /// Random linear map with entries in `[-1, 1]` plus `shift·I`.
    pub fn random_linear(seed: u64, shift: f64) -> Self {
        use rand::Rng;
        let mut r = crate::manufactured::rng(seed);
        let h = Matrix4::from_fn(|i, j| r.gen_range(-1.0..1.0) + if i == j { shift } else { 0.0 });
        CoordinateMap::Linear(h)
    }

    pub fn apply(&self, x: &[f64; 4]) -> [f64; 4] {
        match self {
            CoordinateMap::Linear(h) => {
                let v = h * nalgebra::Vector4::from_column_slice(x);
                [v[0], v[1], v[2], v[3]]
            }
            CoordinateMap::Nonlinear { map, .. } => map(x),
        }
    }

    pub fn jacobian(&self, x: &[f64; 4]) -> Matrix4<f64> {
        match self {
            CoordinateMap::Linear(h) => *h,
            CoordinateMap::Nonlinear { jacobian, .. } => jacobian(x),
        }
    }

    /// `b_{ij} = ∂ξ_j/∂x_i`.
    pub fn coefficients(&self, x: &[f64; 4]) -> Matrix4<f64> {
        self.jacobian(x).transpose()
    }

    /// `self ∘ inner`, i.e. `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &CoordinateMap) -> CoordinateMap {
        match (self, inner) {
            (CoordinateMap::Linear(a), CoordinateMap::Linear(b)) => CoordinateMap::Linear(a * b),
            _ => {
                let (o1, o2, i1, i2) = (self.clone(), self.clone(), inner.clone(), inner.clone());
                CoordinateMap::nonlinear(
                    move |x| o1.apply(&i1.apply(x)),
                    move |x| o2.jacobian(&i2.apply(x)) * i2.jacobian(x),
                )
            }
        }
    }
}

/// Potential to be pulled back: analytic, or sampled on a grid over
/// `xi1..xi4` and interpolated.
#[derive(Clone, Copy)]
pub enum PotentialInput<'a> {
    Analytic(&'a dyn PotentialSource),
    Grid(&'a GaugePotential),
}

impl PotentialInput<'_> {
    fn validate(&self) -> Result<()> {
        if let PotentialInput::Grid(g) = self {
            if g.len() != 4 {
                return Err(Error::Invalid("pullback needs four potential components".into()));
            }
            for (a, ax) in XI.iter().zip(g.spec().axes()) {
                if ax.name != *a {
                    return Err(Error::InvalidGrid("grid potential must live on (xi1, xi2, xi3, xi4)".into()));
                }
                if ax.count < 4 {
                    return Err(Error::InvalidGrid("cubic interpolation needs 4 points per axis".into()));
                }
            }
        }
        Ok(())
    }

    fn eval(&self, xi: &[f64; 4]) -> [Mat; 4] {
        match self {
            PotentialInput::Analytic(s) => s.potential(xi),
            PotentialInput::Grid(g) => {
                let w = Stencil::new(g.spec(), xi);
                std::array::from_fn(|mu| w.apply(&g.components[mu]))
            }
        }
    }
}

/// Tensor-product cubic Lagrange weights at one point.
struct Stencil {
    idx: Vec<[usize; 4]>,
    w: Vec<[f64; 4]>,
    strides: Vec<usize>,
}

impl Stencil {
    fn new(spec: &GridSpec, p: &[f64]) -> Self {
        let mut idx = Vec::new();
        let mut w = Vec::new();
        for (k, a) in spec.axes().iter().enumerate() {
            let s = (p[k] - a.origin) / a.spacing;
            let n = a.count as i64;
            let mut i0 = s.floor() as i64;
            if !a.is_periodic() {
                i0 = i0.clamp(1, n - 3);
            }
            let t = s - i0 as f64;
            w.push([
                -t * (t - 1.0) * (t - 2.0) / 6.0,
                (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                -(t + 1.0) * t * (t - 2.0) / 2.0,
                (t + 1.0) * t * (t - 1.0) / 6.0,
            ]);
            idx.push(std::array::from_fn(|m| (i0 - 1 + m as i64).rem_euclid(n) as usize));
        }
        let strides = (0..spec.ndim()).map(|k| spec.stride(k)).collect();
        Stencil { idx, w, strides }
    }

    fn apply(&self, f: &MatrixField) -> Mat {
        let d = self.idx.len();
        let mut out = Mat::zeros(f.dim());
        for c in 0..4usize.pow(d as u32) {
            let (mut node, mut wt, mut r) = (0, 1.0, c);
            for k in 0..d {
                let m = r % 4;
                r /= 4;
                node += self.idx[k][m] * self.strides[k];
                wt *= self.w[k][m];
            }
            out += f.values()[node] * wt;
        }
        out
    }
}

fn full_point(spec: &GridSpec, base: &[f64; 4]) -> Result<Vec<usize>> {
    if !base.iter().all(|v| v.is_finite()) {
        return Err(Error::Invalid("non-finite base point".into()));
    }
    spec.names()
        .iter()
        .map(|n| {
            XYZT.iter()
                .position(|a| a == n)
                .ok_or_else(|| Error::UnknownAxis(n.to_string()))
        })
        .collect()
}

/// `A_μ(ξ(x))` and `b(x)` at every node of an `(x, y, z, t)` grid; coordinates
/// absent from the grid are held at `base`.
fn image_values(
    a: PotentialInput,
    map: &CoordinateMap,
    spec: &GridSpec,
    base: &[f64; 4],
) -> Result<Field<([Mat; 4], Matrix4<f64>)>> {
    a.validate()?;
    let slots = full_point(spec, base)?;
    let mut bad = None;
    let values = (0..spec.len())
        .map(|n| {
            let mut x = *base;
            for (c, &s) in spec.coords(n).iter().zip(&slots) {
                x[s] = *c;
            }
            let b = map.coefficients(&x);
            if bad.is_none() && !b.iter().all(|v| v.is_finite()) {
                bad = Some(n);
            }
            (a.eval(&map.apply(&x)), b)
        })
        .collect();
    if let Some(node) = bad {
        return Err(Error::Singular { node });
    }
    Field::new(spec.clone(), values)
}

fn contract(vals: &[Mat; 4], b: &Matrix4<f64>, i: usize) -> Mat {
    let mut out = Mat::zeros(vals[0].dim());
    for (j, v) in vals.iter().enumerate() {
        out += *v * b[(i, j)];
    }
    out
}

/// `U_i = Σ_j b_{ij} A_{ξ_j}(ξ(x))` for each `(x, y, z, t)` axis of `spec`;
/// the returned members are named after those axes.
pub fn pullback_connection(
    a: PotentialInput,
    map: &CoordinateMap,
    spec: &GridSpec,
    base: &[f64; 4],
) -> Result<ConnectionSet> {
    let img = image_values(a, map, spec, base)?;
    let slots = full_point(spec, base)?;
    let names = spec.names();
    let members = names
        .iter()
        .zip(&slots)
        .map(|(n, &i)| (*n, img.map(|(v, b)| contract(&v, &b, i))))
        .collect();
    ConnectionSet::new(members)
}

/// An analytic potential seen in the coordinates `x` of a map `ξ = f(x)`.
pub struct PulledBackSource<'a> {
    pub src: &'a dyn PotentialSource,
    pub map: CoordinateMap,
}

impl PotentialSource for PulledBackSource<'_> {
    fn dim(&self) -> usize {
        self.src.dim()
    }
    fn potential(&self, x: &[f64]) -> [Mat; 4] {
        let x: [f64; 4] = [x[0], x[1], x[2], x[3]];
        let vals = self.src.potential(&self.map.apply(&x));
        let b = self.map.coefficients(&x);
        std::array::from_fn(|i| contract(&vals, &b, i))
    }
}

pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Outcome of [`transform_curvature_components`].
#[derive(Clone, Debug)]
pub struct CurvatureTransform {
    /// Per `(x, y, z, t)` pair: the directly computed component and its
    /// mismatch against the tensor transformation.
    pub report: ResidualReport,
    /// For each `(x_i, x_k)` pair, `b_{iμ}b_{kν} − b_{iν}b_{kμ}` over
    /// `(μ, ν)` in [`PAIRS`] order.
    pub coefficients: Vec<((String, String), [f64; 6])>,
}

/// Computes the curvature of the pulled-back connection on a full
/// `(x, y, z, t)` grid in two ways: by differencing `U, V, W, T`, and by
/// evaluating `F_μν` with chain-rule derivatives `∂_{ξ_l} = Σ_i (H⁻¹)_{il} ∂_{x_i}`
/// and contracting with `b`.
pub fn transform_curvature_components(
    a: PotentialInput,
    map: &CoordinateMap,
    spec: &GridSpec,
    scheme: Scheme,
) -> Result<CurvatureTransform> {
    let h = match map {
        CoordinateMap::Linear(h) => *h,
        CoordinateMap::Nonlinear { .. } => {
            return Err(Error::Invalid("curvature transformation needs a linear map".into()))
        }
    };
    if spec.names() != XYZT {
        return Err(Error::InvalidGrid("curvature transformation needs axes (x, y, z, t)".into()));
    }
    let hinv = h
        .try_inverse()
        .ok_or_else(|| Error::Invalid("H is singular".into()))?;
    let base = [0.0; 4];
    let img = image_values(a, map, spec, &base)?;
    let b = h.transpose();

    let comps: Vec<MatrixField> = (0..4).map(|mu| img.map(|(v, _)| v[mu])).collect();
    let derivs = (0..4)
        .map(|l| DerivOp((0..4).map(|i| (XYZT[i].to_string(), C64::new(hinv[(i, l)], 0.0))).collect()))
        .collect();
    let pot = GaugePotential::new(comps, derivs)?;
    let f_xi = PAIRS
        .iter()
        .map(|&(m, n)| strength_component(&pot, m, n, scheme))
        .collect::<Result<Vec<_>>>()?;

    let conns: Vec<MatrixField> = (0..4).map(|i| img.map(|(v, bb)| contract(&v, &bb, i))).collect();
    let mut report = ResidualReport::new();
    let mut coefficients = Vec::new();
    for &(i, k) in &PAIRS {
        let direct = zc_residual_with(&conns[i], &conns[k], XYZT[i], XYZT[k], scheme)?;
        let c: [f64; 6] = std::array::from_fn(|p| {
            let (m, n) = PAIRS[p];
            b[(i, m)] * b[(k, n)] - b[(i, n)] * b[(k, m)]
        });
        let mut tensor = direct.map(|m| Mat::zeros(m.dim()));
        for (w, f) in c.iter().zip(&f_xi) {
            for (o, v) in tensor.values_mut().iter_mut().zip(f.values()) {
                *o += *v * *w;
            }
        }
        let label = format!("F[{},{}]", XYZT[i], XYZT[k]);
        report.push(&label, direct.norms());
        report.push(&format!("{label} direct-vs-tensor"), direct.sub(&tensor)?.norms());
        coefficients.push(((XYZT[i].to_string(), XYZT[k].to_string()), c));
    }
    Ok(CurvatureTransform { report, coefficients })
}

/// Placement of `(A, B, D)` into null-coordinate components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EmbeddingMode {
    /// `A₃ = (A − iB)/2`, `A₄ = (A + iB)/2`: the spatial one-form
    /// `A dx + B dy` rewritten in `dξ₃, dξ₄`.
    #[default]
    OneForm,
    /// `A₃ = A − iB`, `A₄ = A + iB` without the factor ½.
    Literal,
}

/// Gauge potential over `ξ₁ = it`, `ξ₂ = −it`, `ξ₃ = x + iy`, `ξ₄ = x − iy`
/// built from `(A, B, D)` on a real `(x, y, t)` grid, with `A₁ = −iD` and
/// `A₂ = iD`. The `ξ` derivatives act through the chain rule.
pub fn embed_2p1_into_sdym(
    a: &MatrixField,
    b: &MatrixField,
    d: &MatrixField,
    mode: EmbeddingMode,
) -> Result<GaugePotential> {
    let spec = a.spec();
    if b.spec() != spec || d.spec() != spec {
        return Err(Error::GridMismatch);
    }
    for ax in ["x", "y", "t"] {
        spec.axis_index(ax)?;
    }
    let f = match mode {
        EmbeddingMode::OneForm => 0.5,
        EmbeddingMode::Literal => {
            log::warn!("literal embedding A3 = A - iB, A4 = A + iB does not reproduce F[x,y]");
            1.0
        }
    };
    let ib = b.scale(I);
    let comps = vec![
        d.scale(-I),
        d.scale(I),
        a.sub(&ib)?.scale(f.into()),
        a.add(&ib)?.scale(f.into()),
    ];
    let op = |v: &[(&str, C64)]| DerivOp(v.iter().map(|(a, c)| (a.to_string(), *c)).collect());
    let half = C64::new(0.5, 0.0);
    let derivs = vec![
        op(&[("t", -I)]),
        op(&[("t", I)]),
        op(&[("x", half), ("y", -I * 0.5)]),
        op(&[("x", half), ("y", I * 0.5)]),
    ];
    GaugePotential::new(comps, derivs)
}

/// Compares the self-duality components of the embedded potential with the
/// 2+1 zero-curvature residuals of `(A, B, D)`: `F₃₄` against
/// `(i/2)(A_y − B_x + [A,B])` and `F₁₄ − F₂₃` against `i(A_t − D_x + [A,D])`.
/// The third 2+1 equation `B_t − D_y + [B,D]` has no counterpart and is
/// reported separately.
pub fn embedding_check(
    a: &MatrixField,
    b: &MatrixField,
    d: &MatrixField,
    mode: EmbeddingMode,
    scheme: Scheme,
) -> Result<ResidualReport> {
    let pot = embed_2p1_into_sdym(a, b, d, mode)?;
    let mut rep = sd_residual_with(&pot, scheme)?;
    let fxy = zc_residual_with(a, b, "x", "y", scheme)?;
    let fxt = zc_residual_with(a, d, "x", "t", scheme)?;
    let fyt = zc_residual_with(b, d, "y", "t", scheme)?;
    let f34 = strength_component(&pot, 2, 3, scheme)?;
    let f14 = strength_component(&pot, 0, 3, scheme)?;
    let f23 = strength_component(&pot, 1, 2, scheme)?;
    rep.push(
        "F[xi3,xi4]-(i/2)F[x,y]",
        f34.sub(&fxy.scale(I * 0.5))?.norms(),
    );
    rep.push(
        "F[xi1,xi4]-F[xi2,xi3]-iF[x,t]",
        f14.sub(&f23)?.sub(&fxt.scale(I))?.norms(),
    );
    rep.push("F[y,t] (unconstrained)", fyt.norms());
    if mode == EmbeddingMode::Literal {
        rep.warn("literal embedding: self-duality components are not proportional to the 2+1 residuals");
    }
    Ok(rep)
}

/// Representative self-dual potential for the pair `(B₀, B₁)` and the
/// compatibility residual of the pair.
#[derive(Clone, Debug)]
pub struct MmlxviiiIdentification {
    pub potential: GaugePotential,
    pub residual: MatrixField,
}

/// Identifies `E_ξ1 = aE_ξ3 + B₀E`, `E_ξ2 = bE_ξ4 + B₁E` with the self-dual
/// Lax pair at `a = b = λ`, returning `A₁ = B₀`, `A₂ = B₁`, `A₃ = A₄ = 0`.
pub fn mmlxviii_sdym_identify(
    b0: &MatrixField,
    b1: &MatrixField,
    a: C64,
    b: C64,
    scheme: Scheme,
) -> Result<MmlxviiiIdentification> {
    if (a - b).norm() > 1e-12 * a.norm().max(b.norm()).max(1.0) {
        return Err(Error::ParameterMismatch { a, b });
    }
    let residual = mmlxviii_residual(b0, b1, a, b, scheme)?;
    let zero = b0.map(|m| Mat::zeros(m.dim()));
    let potential = GaugePotential::on_xi_grid(vec![b0.clone(), b1.clone(), zero.clone(), zero])?;
    Ok(MmlxviiiIdentification { potential, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::commutator;
    use crate::fields::Axis;
    use crate::manufactured::{rng, EntryKind, GroupField, MatrixSource, Placement, TrigMatrixFn};
    use crate::sdym::{PureGaugeSource, SelfDualSource};
    use crate::zerocurvature::mmlxii_residual;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn order(e: &[f64]) -> f64 {
        (e[e.len() - 2] / e[e.len() - 1]).log2()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pq_inputs(p: C64, q: C64) -> ReductionInputs {
        let spec = GridSpec::closed(&["x"], 4, 0.0, 1.0).unwrap();
        ReductionInputs::Potentials {
            p: Field::constant(&spec, p),
            q: Field::constant(&spec, q),
        }
    }

    #[test]
    fn zs_akns_closed_form() {
        let (p, q, l) = (c(0.3, -0.2), c(-1.1, 0.4), c(0.7, 0.25));
        let u = named_connection(ReductionKind::ZsAkns, &pq_inputs(p, q), l).unwrap();
        let want = Mat::from_entries(2, &[I * l, q, p, -I * l]);
        for m in u.get("x").unwrap().values() {
            assert!((*m - want).frobenius() < 1e-15);
        }
        let vac = named_connection(ReductionKind::ZsAkns, &pq_inputs(c(0.0, 0.0), c(0.0, 0.0)), l).unwrap();
        let d = Mat::from_entries(2, &[I * l, c(0.0, 0.0), c(0.0, 0.0), -I * l]);
        assert!((vac.get("x").unwrap().values()[0] - d).frobenius() < 1e-15);
    }

    proptest! {
        #[test]
        fn zs_akns_lambda_negation_flips_diagonal(pr in -2.0..2.0f64, pi in -2.0..2.0f64,
                                                  qr in -2.0..2.0f64, lr in -3.0..3.0f64, li in -3.0..3.0f64) {
            let inp = pq_inputs(c(pr, pi), c(qr, -pi));
            let a = named_connection(ReductionKind::ZsAkns, &inp, c(lr, li)).unwrap();
            let b = named_connection(ReductionKind::ZsAkns, &inp, c(-lr, -li)).unwrap();
            let (ua, ub) = (a.get("x").unwrap().values()[0], b.get("x").unwrap().values()[0]);
            prop_assert!((ua.get(0, 0) + ub.get(0, 0)).norm() < 1e-14);
            prop_assert!((ua.get(1, 1) + ub.get(1, 1)).norm() < 1e-14);
            prop_assert!((ua.get(0, 1) - ub.get(0, 1)).norm() < 1e-14);
            prop_assert!((ua.get(1, 0) - ub.get(1, 0)).norm() < 1e-14);
        }

        #[test]
        fn composite_pullback_matches(seed in 0u64..1000) {
            let src = SelfDualSource::seeded(seed, 2);
            let h1 = CoordinateMap::random_linear(seed + 1, 2.0);
            let h2 = CoordinateMap::random_linear(seed + 2, 2.0);
            let inner = PulledBackSource { src: &src, map: h2.clone() };
            let twice = PulledBackSource { src: &inner, map: h1.clone() };
            let once = PulledBackSource { src: &src, map: h2.compose(&h1) };
            let x = [0.3, -0.7, 1.1, 0.2];
            let (a, b) = (twice.potential(&x), once.potential(&x));
            for mu in 0..4 {
                prop_assert!((a[mu] - b[mu]).frobenius() <= 1e-12 * (1.0 + a[mu].frobenius()));
            }
        }
    }

    #[test]
    fn knwki_offdiagonal_linear_in_lambda() {
        let inp = pq_inputs(c(0.4, 0.1), c(-0.3, 0.8));
        let ratios: Vec<C64> = [c(0.5, 0.0), c(1.5, -0.3), c(-2.0, 1.0)]
            .iter()
            .map(|&l| named_connection(ReductionKind::Knwki, &inp, l).unwrap().get("x").unwrap().values()[0].get(0, 1) / l)
            .collect();
        assert!((ratios[0] - ratios[1]).norm() < 1e-14 && (ratios[0] - ratios[2]).norm() < 1e-14);
        assert!((ratios[0] - c(-0.3, 0.8)).norm() < 1e-14);
    }

    #[test]
    fn missing_inputs_and_poles() {
        let inp = pq_inputs(c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(
            named_connection(ReductionKind::ChiralField, &inp, c(0.5, 0.0)),
            Err(Error::Missing(_))
        ));
        let spec = GridSpec::closed(&["x", "t"], 4, 0.0, 1.0).unwrap();
        let z = Field::constant(&spec, Mat::zeros(2));
        let ch = ReductionInputs::Chiral { u: z.clone(), v: z.clone() };
        for l in [1.0, -1.0] {
            assert!(matches!(named_connection(ReductionKind::ChiralField, &ch, c(l, 0.0)), Err(Error::Pole(_))));
            assert!(matches!(chiral_field_residual(&z, &z, c(l, 0.0)), Err(Error::Pole(_))));
        }
        assert_eq!(chiral_field_residual(&z, &z, c(0.5, 0.0)).unwrap().max_linf(), 0.0);
    }

    #[test]
    fn gwe_and_spin_constraint() {
        let spec = GridSpec::periodic(&["x"], 16, TAU).unwrap();
        let n = 1.7;
        let k = Field::from_fn(&spec, |x| n * x[0].cos());
        let s = Field::from_fn(&spec, |x| n * x[0].sin() * 0.6);
        let t = Field::from_fn(&spec, |x| n * x[0].sin() * 0.8);
        assert!(spin_constraint_deviation(&k, &s, &t, n).unwrap() < 1e-15);
        assert!(satisfies_spin_constraint(&k, &s, &t, n, 1e-12));
        let inp = ReductionInputs::Spin { k: k.clone(), sigma: s.clone(), tau: t.clone(), n };
        let u = named_connection(ReductionKind::SpinConstraint, &inp, c(0.0, 0.0)).unwrap();
        let g = named_connection(
            ReductionKind::GweCmpe,
            &ReductionInputs::Triple { k: k.clone(), sigma: s.clone(), tau: t.clone() },
            c(3.0, 0.0),
        )
        .unwrap();
        assert_eq!(u.get("x").unwrap(), g.get("x").unwrap());
        let bad = ReductionInputs::Spin { k: k.map(|v| v * 1.01), sigma: s, tau: t, n };
        assert!(matches!(named_connection(ReductionKind::SpinConstraint, &bad, c(0.0, 0.0)), Err(Error::Constraint(_))));
    }

    fn chiral_initial(seed: u64) -> (TrigMatrixFn, TrigMatrixFn) {
        let mut r = rng(seed);
        let u = TrigMatrixFn::random(&mut r, 2, 1, 3, 2, 0.6, EntryKind::Complex).anti_hermitian();
        let v = TrigMatrixFn::random(&mut r, 2, 1, 3, 2, 0.6, EntryKind::Complex).anti_hermitian();
        (u, v)
    }

    fn chiral_errors(lambdas: &[C64]) -> Vec<Vec<f64>> {
        let (fu, fv) = chiral_initial(7);
        [17usize, 33, 65]
            .iter()
            .map(|&n| {
                let spec = GridSpec::closed(&["x", "t"], n, 0.0, 1.0).unwrap();
                let (u, v) = solve_chiral(&spec, &|x| fu.eval(&[x]), &|t| fv.eval(&[t])).unwrap();
                let mut e: Vec<f64> = lambdas
                    .iter()
                    .map(|&l| chiral_field_residual(&u, &v, l).unwrap().get("zc(lambda)").unwrap().linf)
                    .collect();
                let rep = chiral_field_residual(&u, &v, lambdas[0]).unwrap();
                e.push(rep.get("u_t+[u,v]/2").unwrap().linf);
                e.push(rep.get("v_x-[u,v]/2").unwrap().linf);
                e
            })
            .collect()
    }

    #[test]
    fn evolved_chiral_solution_is_lambda_uniform() {
        let ls = [c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 2.0)];
        let e = chiral_errors(&ls);
        for col in 0..e[0].len() {
            let s: Vec<f64> = e.iter().map(|r| r[col]).collect();
            assert!(order(&s) > 1.8, "column {col}: {s:?}");
        }
    }

    #[test]
    fn chiral_control_not_solution() {
        // Replacing v by an unrelated field breaks the equations.
        let (fu, fv) = chiral_initial(7);
        let spec = GridSpec::closed(&["x", "t"], 33, 0.0, 1.0).unwrap();
        let (u, _) = solve_chiral(&spec, &|x| fu.eval(&[x]), &|t| fv.eval(&[t])).unwrap();
        let v = Placement::origin(&["x", "t"]).sample(&spec, |p| fv.eval(&[p[0] + p[1]])).unwrap();
        let r = chiral_field_residual(&u, &v, c(0.5, 0.0)).unwrap();
        assert!(r.get("zc(lambda)").unwrap().linf > 1e-2);
    }

    fn xyzt_slice(n: usize, names: &[&str]) -> GridSpec {
        GridSpec::new(names.iter().map(|a| Axis::closed(a, n, -0.5, 0.5)).collect()).unwrap()
    }

    #[test]
    fn identity_map_and_zero_potential() {
        let src = SelfDualSource::seeded(3, 2);
        let spec = xyzt_slice(6, &["x", "y", "z", "t"]);
        let id = CoordinateMap::linear(Matrix4::identity()).unwrap();
        let pb = pullback_connection(PotentialInput::Analytic(&src), &id, &spec, &[0.0; 4]).unwrap();
        let pot = GaugePotential::sample(&spec, &Placement::origin(&XYZT), &src).unwrap();
        for (i, ax) in XYZT.iter().enumerate() {
            assert_eq!(pb.get(ax).unwrap(), &pot.components[i]);
        }
        let zero = PureGaugeSource(GroupField::near_identity(1, 2, 4, 0.0));
        let h = CoordinateMap::random_linear(5, 2.0);
        let pz = pullback_connection(PotentialInput::Analytic(&zero), &h, &spec, &[0.0; 4]).unwrap();
        assert!(pz.scale() < 1e-15);
        let sing = Matrix4::from_fn(|i, _| i as f64);
        assert!(CoordinateMap::linear(sing).is_err());
    }

    #[test]
    fn pure_gauge_pullback_is_flat_at_second_order() {
        let src = PureGaugeSource(GroupField::unitary(11, 2, 4, 0.5));
        let h = CoordinateMap::random_linear(21, 1.5);
        let errs: Vec<f64> = [16usize, 32, 64]
            .iter()
            .map(|&n| {
                let spec = xyzt_slice(n, &["x", "t"]);
                let pb = pullback_connection(PotentialInput::Analytic(&src), &h, &spec, &[0.1, 0.2, -0.1, 0.0]).unwrap();
                mmlxii_residual(&pb).unwrap().max_linf()
            })
            .collect();
        assert!(order(&errs) > 1.8, "{errs:?}");
    }

    #[test]
    fn nonflat_self_dual_pullback_is_not_flat() {
        let src = SelfDualSource::seeded(4, 2);
        let h = CoordinateMap::random_linear(21, 1.5);
        let errs: Vec<f64> = [16usize, 32]
            .iter()
            .map(|&n| {
                let spec = xyzt_slice(n, &["x", "y"]);
                let pb = pullback_connection(PotentialInput::Analytic(&src), &h, &spec, &[0.0; 4]).unwrap();
                mmlxii_residual(&pb).unwrap().max_linf()
            })
            .collect();
        assert!(errs[1] > 0.5 * errs[0], "{errs:?}");
    }

    #[test]
    fn grid_pullback_tracks_analytic() {
        let src = PureGaugeSource(GroupField::unitary(2, 2, 4, 0.4));
        let h = CoordinateMap::linear(Matrix4::new(
            1.0, 0.2, 0.0, 0.1, //
            0.0, 1.0, 0.3, 0.0, //
            0.1, 0.0, 1.0, 0.2, //
            0.0, 0.1, 0.0, 1.0,
        ))
        .unwrap();
        let xspec = xyzt_slice(8, &["x", "t"]);
        let exact = pullback_connection(PotentialInput::Analytic(&src), &h, &xspec, &[0.0; 4]).unwrap();
        let errs: Vec<f64> = [12usize, 24]
            .iter()
            .map(|&n| {
                let xi = GridSpec::periodic(&XI, n, TAU).unwrap();
                let pot = GaugePotential::sample(&xi, &Placement::origin(&XI), &src).unwrap();
                let pb = pullback_connection(PotentialInput::Grid(&pot), &h, &xspec, &[0.0; 4]).unwrap();
                ["x", "t"]
                    .iter()
                    .map(|a| pb.get(a).unwrap().sub(exact.get(a).unwrap()).unwrap().norms().0)
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[1] < 1e-2 && order(&errs) > 3.0, "{errs:?}");
    }

    #[test]
    fn curvature_tensor_transformation() {
        let h = CoordinateMap::random_linear(8, 2.0);
        let sd = SelfDualSource::seeded(6, 2);
        let mism: Vec<f64> = [9usize, 17]
            .iter()
            .map(|&n| {
                let spec = GridSpec::closed(&XYZT, n, 0.0, 0.5).unwrap();
                let r = transform_curvature_components(PotentialInput::Analytic(&sd), &h, &spec, Scheme::Central2).unwrap();
                let direct = r.report.get("F[x,y]").unwrap().linf;
                assert!(direct > 1e-2);
                PAIRS
                    .iter()
                    .map(|&(i, k)| r.report.get(&format!("F[{},{}] direct-vs-tensor", XYZT[i], XYZT[k])).unwrap().linf)
                    .fold(0.0, f64::max)
            })
            .collect();
        // Differencing is linear and b·H⁻¹ = I, so the routes agree to rounding.
        assert!(mism.iter().all(|&m| m < 1e-11), "{mism:?}");
        let id = CoordinateMap::linear(Matrix4::identity()).unwrap();
        let spec = GridSpec::closed(&XYZT, 6, 0.0, 0.5).unwrap();
        let r = transform_curvature_components(PotentialInput::Analytic(&sd), &id, &spec, Scheme::Central2).unwrap();
        assert!(r.report.entries.iter().filter(|e| e.label.contains("vs")).all(|e| e.linf < 1e-13));
        assert_eq!(r.coefficients[0].1, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let nl = CoordinateMap::nonlinear(|x| *x, |_| Matrix4::identity());
        assert!(transform_curvature_components(PotentialInput::Analytic(&sd), &nl, &spec, Scheme::Central2).is_err());
    }

    fn flat_2p1(n: usize, g: &GroupField) -> (MatrixField, MatrixField, MatrixField) {
        let spec = GridSpec::periodic(&["x", "y", "t"], n, TAU).unwrap();
        let pl = Placement::origin(&["x", "y", "t"]);
        let f = |a| pl.sample_connection(&spec, g, a).unwrap();
        (f("x"), f("y"), f("t"))
    }

    #[test]
    fn embedding_identities_hold_off_shell() {
        let mut r = rng(3);
        let spec = GridSpec::periodic(&["x", "y", "t"], 8, TAU).unwrap();
        let pl = Placement::origin(&["x", "y", "t"]);
        let mut mk = || {
            let f = TrigMatrixFn::random(&mut r, 2, 3, 3, 1, 0.5, EntryKind::Complex);
            pl.sample_source(&spec, &f).unwrap()
        };
        let (a, b, d) = (mk(), mk(), mk());
        let rep = embedding_check(&a, &b, &d, EmbeddingMode::OneForm, Scheme::Central2).unwrap();
        assert!(rep.get("F[xi1,xi2]").unwrap().linf < 1e-14);
        assert!(rep.get("F[xi3,xi4]-(i/2)F[x,y]").unwrap().linf < 1e-13);
        assert!(rep.get("F[xi1,xi4]-F[xi2,xi3]-iF[x,t]").unwrap().linf < 1e-13);
        let lit = embedding_check(&a, &b, &d, EmbeddingMode::Literal, Scheme::Central2).unwrap();
        assert!(lit.get("F[xi3,xi4]-(i/2)F[x,y]").unwrap().linf > 1e-2);
        assert!(!lit.warnings.is_empty());
    }

    #[test]
    fn flat_embedding_converges_and_control_fails() {
        let g = GroupField::unitary(5, 2, 3, 0.5);
        let mut clean = Vec::new();
        let mut pert = Vec::new();
        let cm = Mat::from_entries(2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        for n in [8usize, 16, 32] {
            let (a, b, d) = flat_2p1(n, &g);
            clean.push(sd_residual_with(&embed_2p1_into_sdym(&a, &b, &d, EmbeddingMode::OneForm).unwrap(), Scheme::Central2).unwrap().max_linf());
            let dp = d.map(|m| m + cm * 0.1);
            pert.push(sd_residual_with(&embed_2p1_into_sdym(&a, &b, &dp, EmbeddingMode::OneForm).unwrap(), Scheme::Central2).unwrap().max_linf());
        }
        assert!(order(&clean) > 1.8, "{clean:?}");
        assert!(order(&pert).abs() < 0.2, "{pert:?}");
    }

    #[test]
    fn embedding_linear_in_perturbation() {
        let g = GroupField::unitary(5, 2, 3, 0.5);
        let (a, b, d) = flat_2p1(32, &g);
        let cm = Mat::from_entries(2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let res = |eps: f64| {
            let dp = d.map(|m| m + cm * eps);
            sd_residual_with(&embed_2p1_into_sdym(&a, &b, &dp, EmbeddingMode::OneForm).unwrap(), Scheme::Central2)
                .unwrap()
                .get("F[xi1,xi4]-F[xi2,xi3]")
                .unwrap()
                .linf
        };
        let ratio = res(0.02) / res(0.01);
        assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn mmlxviii_identification() {
        let spec = GridSpec::closed(&XI, 5, 0.0, 1.0).unwrap();
        let z = Field::constant(&spec, Mat::zeros(2));
        assert!(matches!(
            mmlxviii_sdym_identify(&z, &z, c(1.0, 0.0), c(2.0, 0.0), Scheme::Central2),
            Err(Error::ParameterMismatch { .. })
        ));
        let id = mmlxviii_sdym_identify(&z, &z, c(0.5, 0.0), c(0.5, 0.0), Scheme::Central2).unwrap();
        assert_eq!(id.residual.norms().0, 0.0);
        assert_eq!(id.potential.len(), 4);
        let e12 = Mat::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        let e21 = Mat::from_real(2, &[0.0, 0.0, 1.0, 0.0]);
        assert!(commutator(&e12, &(e12 * 2.0)).unwrap().frobenius() == 0.0);
        let id = mmlxviii_sdym_identify(
            &Field::constant(&spec, e12),
            &Field::constant(&spec, e12 * 3.0),
            c(0.5, 0.0),
            c(0.5, 0.0),
            Scheme::Central2,
        )
        .unwrap();
        assert_eq!(id.residual.norms().0, 0.0);
        let nc = mmlxviii_residual(&Field::constant(&spec, e12), &Field::constant(&spec, e21), c(0.5, 0.0), c(0.5, 0.0), Scheme::Central2).unwrap();
        assert!(nc.norms().0 > 0.9);
    }

    #[test]
    fn mmlxviii_manufactured_pair_converges() {
        let g = GroupField::unitary(9, 2, 4, 0.5);
        let lam = c(0.7, 0.0);
        let errs: Vec<f64> = [9usize, 17]
            .iter()
            .map(|&n| {
                let spec = GridSpec::closed(&XI, n, 0.0, 1.0).unwrap();
                let pl = Placement::origin(&XI);
                let f = |a| pl.sample_connection(&spec, &g, a).unwrap();
                let b0 = f("xi1").sub(&f("xi3").scale(lam)).unwrap();
                let b1 = f("xi2").sub(&f("xi4").scale(lam)).unwrap();
                mmlxviii_sdym_identify(&b0, &b1, lam, lam, Scheme::Central2).unwrap().residual.norms().0
            })
            .collect();
        assert!(order(&errs) > 1.8, "{errs:?}");
    }

    #[test]
    fn interpolation_exact_for_cubics() {
        let spec = GridSpec::closed(&["xi1", "xi2"], 6, 0.0, 1.0).unwrap();
        let f: MatrixField = Field::from_fn(&spec, |x| Mat::identity(2) * (x[0].powi(3) - 2.0 * x[0] * x[1] * x[1]));
        for p in [[0.13f64, 0.71], [0.95, 0.02], [0.5, 0.5]] {
            let want = p[0].powi(3) - 2.0 * p[0] * p[1] * p[1];
            let got = Stencil::new(&spec, &p).apply(&f).get(0, 0).re;
            assert!((got - want).abs() < 1e-13, "{got} {want}");
        }
    }
}
