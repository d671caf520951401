//! Spin fields on a line, the isotropic Landau–Lifshitz equation
//! `S_t = S × S_xx` (matrix form `2iS_t = [S, S_xx]`), its Lax pair and the
//! gauge map between frame connections.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Mat, Vec3};
use crate::error::{Error, Result};
use crate::fields::{Axis, Field, GridSpec, MatrixField, ResidualReport, ScalarField, Scheme, VectorField};
use crate::reductions::spin_constraint_deviation;
use crate::sdym::GaugeGroupElement;
use crate::zerocurvature::{wavefunction_path_check, zc_residual_with, ConnectionSet};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest tolerated `| |S| − 1 |`.
pub const UNIT_TOL: f64 = 1e-10;

/// Unit spin vectors on a grid with an `x` axis, together with the constant
/// spectral parameter `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinField {
    pub field: VectorField,
    pub n: f64,
}

impl SpinField {
    pub fn new(field: VectorField, n: f64) -> Result<Self> {
        field.spec().axis_index("x")?;
        if !n.is_finite() || n < 0.0 {
            return Err(Error::Invalid(format!("n must be finite and non-negative, got {n}")));
        }
        let dev = norm_deviation(&field);
        if dev > UNIT_TOL {
            return Err(Error::Constraint(dev));
        }
        Ok(SpinField { field, n })
    }

    pub fn spec(&self) -> &GridSpec {
        self.field.spec()
    }

    /// Pauli-basis matrices `S = Σ Sᵢσᵢ`, which satisfy `S² = I`.
    pub fn matrices(&self) -> MatrixField {
        self.field.map(|s| s.spin_matrix())
    }

    pub fn norm_deviation(&self) -> f64 {
        norm_deviation(&self.field)
    }
}

fn norm_deviation(f: &VectorField) -> f64 {
    f.values().iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max)
}

/// `S = (k, σ, τ)/n`, accepted when `k² + σ² + τ² = n²` holds within `1e-8`
/// relative; the result is projected onto the unit sphere.
pub fn spin_from_curvatures(k: &ScalarField, sigma: &ScalarField, tau: &ScalarField, n: f64) -> Result<SpinField> {
    let dev = spin_constraint_deviation(k, sigma, tau, n)?;
    if dev > crate::reductions::SPIN_CONSTRAINT_TOL {
        return Err(Error::Constraint(dev));
    }
    let v = k.zip_map(sigma, |a, b| (a, b))?.zip_map(tau, |(a, b), c| {
        let s = Vec3::new(a / n, b / n, c / n);
        s * (1.0 / s.norm())
    })?;
    SpinField::new(v, n)
}

/// `S × S_xx`, tangent to the sphere at every node.
pub fn lle_rhs(s: &SpinField) -> Result<VectorField> {
    lle_rhs_with(s, Scheme::Central2)
}

pub fn lle_rhs_with(s: &SpinField, scheme: Scheme) -> Result<VectorField> {
    let sxx = s.field.second_partial("x", scheme)?;
    s.field.zip_map(&sxx, |a, b| a.cross(&b))
}

/// How `U` relates to the spin matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinNormalization {
    /// `U = nS` with `S² = I`.
    #[default]
    Involutive,
    /// `U = (n/2i)S`, matching the `(1/2i)` layout of the su(2) triple; here
    /// `U` and `V` are both anti-Hermitian.
    SuTwo,
}

impl SpinNormalization {
    /// Effective spectral factor `μ` with `U = μS`.
    pub fn factor(self, n: f64) -> C64 {
        match self {
            SpinNormalization::Involutive => C64::new(n, 0.0),
            SpinNormalization::SuTwo => C64::new(n, 0.0) / (I * 2.0),
        }
    }
}

/// `V = −iμ S S_x − 2iμ² S` with `μ = n` (or `n/2i`).
pub fn lle_v_matrix(s: &SpinField, norm: SpinNormalization) -> Result<MatrixField> {
    lle_v_matrix_with(s, norm, Scheme::Central2)
}

pub fn lle_v_matrix_with(s: &SpinField, norm: SpinNormalization, scheme: Scheme) -> Result<MatrixField> {
    let mu = norm.factor(s.n);
    let sm = s.matrices();
    let sx = s.field.partial("x", scheme)?.map(|v| v.spin_matrix());
    sm.zip_map(&sx, |a, b| (a * b).scale(-I * mu) - a.scale(I * 2.0 * mu * mu))
}

/// Off-shell comparison of `S_t − (1/n)V_x + [S,V]` with the Landau–Lifshitz
/// residual `S_t − (1/2i)[S, S_xx]`.
pub fn m0_equivalence_residual(s: &SpinField) -> Result<ResidualReport> {
    m0_equivalence_residual_with(s, Scheme::Central2)
}

pub fn m0_equivalence_residual_with(s: &SpinField, scheme: Scheme) -> Result<ResidualReport> {
    if s.n <= 0.0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let sm = s.matrices();
    let st = sm.partial("t", scheme)?;
    let v = lle_v_matrix_with(s, SpinNormalization::Involutive, scheme)?;
    let r1 = st
        .sub(&v.partial("x", scheme)?.scale((1.0 / s.n).into()))?
        .add(&sm.commutator(&v)?)?;
    let sxx = s.field.second_partial("x", scheme)?.map(|v| v.spin_matrix());
    let r2 = st.sub(&sm.commutator(&sxx)?.scale((I * 2.0).inv()))?;
    let mut rep = ResidualReport::new();
    rep.push("S_t-V_x/n+[S,V]", r1.norms());
    rep.push("S_t-[S,S_xx]/2i", r2.norms());
    rep.push("difference", r1.sub(&r2)?.norms());
    Ok(rep)
}

/// `U = μS` and `V` from [`lle_v_matrix`] on an `(x, t)` grid.
pub fn lle_connection(s: &SpinField, norm: SpinNormalization) -> Result<ConnectionSet> {
    let u = s.matrices().scale(norm.factor(s.n));
    let v = lle_v_matrix(s, norm)?;
    ConnectionSet::new(vec![("x", u), ("t", v)])
}

/// Path independence of `ψ_x = Uψ`, `ψ_t = Vψ` together with the flatness of
/// `(U, V)`.
pub fn lle_lax_check(s: &SpinField, norm: SpinNormalization) -> Result<ResidualReport> {
    let conns = lle_connection(s, norm)?;
    wavefunction_path_check(&conns, &Mat::identity(2), &["x", "t"])
}

/// `C = E⁻¹C′E − E⁻¹E_x`, `G = E⁻¹G′E − E⁻¹E_t`.
pub fn gauge_frame_transform(
    cp: &MatrixField,
    gp: &MatrixField,
    e: &GaugeGroupElement,
    scheme: Scheme,
) -> Result<(MatrixField, MatrixField)> {
    let ei = e.inverse();
    let tr = |p: &MatrixField, axis: &str| -> Result<MatrixField> {
        let de = e.phi.partial(axis, scheme)?;
        ei.mul(p)?.mul(&e.phi)?.sub(&ei.mul(&de)?)
    };
    Ok((tr(cp, "x")?, tr(gp, "t")?))
}

/// `C_t − G_x + [C, G]` on an `(x, t)` grid.
pub fn frame_pair_residual(c: &MatrixField, g: &MatrixField, scheme: Scheme) -> Result<MatrixField> {
    zc_residual_with(c, g, "x", "t", scheme)
}

/// Precession rate `k² cos θ` of the helical solution.
pub fn helix_frequency(theta: f64, k: f64) -> f64 {
    k * k * theta.cos()
}

/// Precession rate of the helix under the three-point Laplacian with
/// spacing `h`: `k_h² cos θ`, `k_h² = 2(1 − cos kh)/h²`.
pub fn discrete_helix_frequency(theta: f64, k: f64, h: f64) -> f64 {
    2.0 * (1.0 - (k * h).cos()) / (h * h) * theta.cos()
}

/// `S = (sinθ cos φ, sinθ sin φ, cosθ)` with `φ = kx − ωt`.
pub fn helix_point(theta: f64, k: f64, omega: f64, x: f64, t: f64) -> Vec3 {
    let p = k * x - omega * t;
    Vec3::new(theta.sin() * p.cos(), theta.sin() * p.sin(), theta.cos())
}

/// Exact helical solution on a grid with axes `x` and optionally `t`.
pub fn helix_field(spec: &GridSpec, theta: f64, k: f64, n: f64) -> Result<SpinField> {
    let ix = spec.axis_index("x")?;
    let it = spec.axis_index("t").ok();
    let w = helix_frequency(theta, k);
    let f = Field::from_fn(spec, |c| helix_point(theta, k, w, c[ix], it.map_or(0.0, |i| c[i])));
    SpinField::new(f, n)
}

/// Rotation angle of the helix relative to `φ = kx`, as the circular mean of
/// `atan2(S₂, S₁) − kx` over the line.
pub fn helix_phase(line: &[Vec3], xs: &[f64], k: f64) -> f64 {
    let (mut c, mut s) = (0.0, 0.0);
    for (v, x) in line.iter().zip(xs) {
        let a = v.0[1].atan2(v.0[0]) - k * x;
        c += a.cos();
        s += a.sin();
    }
    s.atan2(c)
}

/// Discrete exchange energy `Σ |S_{i+1} − S_i|² / h` on a periodic line.
pub fn exchange_energy(line: &[Vec3], h: f64) -> f64 {
    let n = line.len();
    (0..n).map(|i| {
        let d = line[(i + 1) % n] - line[i];
        d.dot(&d)
    }).sum::<f64>()
        / h
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LleOptions {
    /// Keep every `record_every`-th step in the output.
    pub record_every: usize,
    /// Fixed-point tolerance of the implicit step.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LleOptions {
    fn default() -> Self {
        LleOptions {
            record_every: 1,
            tol: 1e-14,
            max_iter: 100,
        }
    }
}

/// Trajectory and run diagnostics.
#[derive(Clone, Debug)]
pub struct LleRun {
    /// Spin field on `(x, t)`; the `t` axis holds the recorded steps.
    pub spin: SpinField,
    pub dt: f64,
    pub steps: usize,
    pub max_norm_drift: f64,
    pub energy_drift: f64,
}

/// Implicit-midpoint integration of `S_t = S × S_xx` on a periodic line.
/// Each node is rotated by the Cayley transform of `w = −(dt/2)H`, where
/// `H = (S̄_{i+1} + S̄_{i−1})/h²` is built from midpoint values `S̄`, so unit
/// length holds exactly and the discrete exchange energy is conserved up to
/// the fixed-point tolerance. `dt` is shortened so the run ends exactly at
/// `t_final` with a whole number of recorded intervals.
pub fn lle_integrate(s0: &SpinField, t_final: f64, dt: f64, opts: &LleOptions) -> Result<LleRun> {
    let spec = s0.spec();
    if spec.ndim() != 1 || !spec.axes()[0].is_periodic() {
        return Err(Error::InvalidGrid("LLE integration needs a single periodic x axis".into()));
    }
    let ax = &spec.axes()[0];
    let h = ax.spacing;
    let bound = 0.5 * h * h;
    if !(dt > 0.0) || dt > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }
    if !(t_final > 0.0) || opts.record_every == 0 {
        return Err(Error::Invalid("need positive duration and record interval".into()));
    }
    let r = opts.record_every;
    let mut steps = (t_final / dt).ceil() as usize;
    steps = steps.div_ceil(r).max(2) * r;
    let dt = t_final / steps as f64;
    let n = ax.count;
    let mut cur: Vec<Vec3> = s0.field.values().to_vec();
    let e0 = exchange_energy(&cur, h);
    let mut out = Vec::with_capacity(n * (steps / r + 1));
    out.extend_from_slice(&cur);
    let mut next = cur.clone();
    let mut mid = cur.clone();
    for step in 1..=steps {
        let mut converged = false;
        for _ in 0..opts.max_iter {
            for i in 0..n {
                mid[i] = (cur[i] + next[i]) * 0.5;
            }
            let mut change: f64 = 0.0;
            for i in 0..n {
                let hf = (mid[(i + 1) % n] + mid[(i + n - 1) % n]) * (1.0 / (h * h));
                let new = cayley(hf * (-0.5 * dt), cur[i]);
                change = change.max((new - next[i]).norm());
                next[i] = new;
            }
            if change <= opts.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence(format!("implicit LLE step {step}")));
        }
        std::mem::swap(&mut cur, &mut next);
        next.copy_from_slice(&cur);
        if step % r == 0 {
            out.extend_from_slice(&cur);
        }
    }
    let times = steps / r + 1;
    let grid = GridSpec::new(vec![
        ax.clone(),
        Axis::closed("t", times, 0.0, t_final),
    ])?;
    // Stored time-major above; reorder to x-major.
    let mut vals = Vec::with_capacity(out.len());
    for i in 0..n {
        for j in 0..times {
            vals.push(out[j * n + i]);
        }
    }
    let max_norm_drift = out.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max);
    let energy_drift = if e0 > 0.0 {
        (exchange_energy(&cur, h) - e0).abs() / e0
    } else {
        exchange_energy(&cur, h)
    };
    let field = Field::new(grid, vals)?;
    Ok(LleRun {
        spin: SpinField { field, n: s0.n },
        dt,
        steps,
        max_norm_drift,
        energy_drift,
    })
}

/// `(I − ŵ)⁻¹(I + ŵ) s`, with `ŵ` the cross-product matrix of `w`.
fn cayley(w: Vec3, s: Vec3) -> Vec3 {
    let ws = w.cross(&s);
    let wws = w.cross(&ws);
    s + (ws + wws) * (2.0 / (1.0 + w.dot(&w)))
}
