//! Moving frames: integration of `E_s = A E` along grid axes, the two-axis
//! advection–rotation system, compatibility residuals and curve
//! reconstruction.
//!
//! A frame is a real [`Mat`] whose rows are `e₁, e₂(, e₃)`. Frames are
//! orthonormal with respect to the ambient metric `η = diag(β, 1, 1)`, so
//! their Gram matrix `E η Eᵀ` equals `η`.

use std::io::Write;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{plane_generator, so3_from_coefficients, so3_from_triple, CoefficientTriple, CurvatureTriple, Mat, Sign};
use crate::error::{Error, Result};
use crate::fields::{Field, GridSpec, MatrixField, ResidualReport, ScalarField, Scheme};
use crate::zerocurvature::ConnectionSet;

/// Frame propagation scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stepper {
    /// `E ← exp(h Ā) E` with `Ā` the midpoint generator. Rodrigues for real
    /// antisymmetric `Ā`, the general exponential otherwise; either way the
    /// Gram matrix is preserved up to rounding.
    #[default]
    Exponential,
    /// Classical RK4 followed by Gram–Schmidt against `η`.
    Rk4,
}

pub fn metric(dim: usize, beta: Sign) -> Mat {
    let mut g = Mat::identity(dim);
    g.set(0, 0, C64::new(beta.value(), 0.0));
    g
}

/// `‖E η Eᵀ − η‖_F`.
pub fn gram_deviation(e: &Mat, beta: Sign) -> f64 {
    let g = metric(e.dim(), beta);
    (*e * g * e.transpose() - g).frobenius()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameField {
    pub frames: MatrixField,
    pub beta: Sign,
}

impl FrameField {
    pub fn spec(&self) -> &GridSpec {
        self.frames.spec()
    }

    /// Largest Gram-matrix deviation over all nodes.
    pub fn gram_drift(&self) -> f64 {
        self.frames
            .values()
            .iter()
            .map(|e| gram_deviation(e, self.beta))
            .fold(0.0, f64::max)
    }

    /// Largest node distance to another frame field on the same grid.
    pub fn max_difference(&self, other: &FrameField) -> Result<f64> {
        Ok(self.frames.sub(&other.frames)?.norms().0)
    }
}

/// Coefficients of one axis of the frame system.
#[derive(Clone, Debug)]
pub enum AxisCoefficients {
    /// `(k, σ, τ)` placed as in the curve case.
    Curvature { k: ScalarField, sigma: ScalarField, tau: ScalarField },
    /// `(c₁, c₂, c₃)` placed as `(τ, σ, k) = (c₁, c₂, c₃)`.
    Triple { c1: ScalarField, c2: ScalarField, c3: ScalarField },
    /// Single plane-case coefficient.
    Plane(ScalarField),
}

/// Per-axis frame coefficients with the sign `β`.
#[derive(Clone, Debug)]
pub struct ConnectionCoefficients {
    pub beta: Sign,
    pub axes: Vec<(String, AxisCoefficients)>,
}

impl ConnectionCoefficients {
    /// Generator fields `A_axis` for every listed axis.
    pub fn generators(&self) -> Result<ConnectionSet> {
        let mut members = Vec::new();
        for (name, c) in &self.axes {
            if !["x", "y", "z", "t"].contains(&name.as_str()) {
                return Err(Error::Invalid(format!("frame axis `{name}` is not one of x, y, z, t")));
            }
            let beta = self.beta;
            let f = match c {
                AxisCoefficients::Curvature { k, sigma, tau } => k
                    .zip_map(sigma, |a, b| (a, b))?
                    .zip_map(tau, |(a, b), c| so3_from_triple(&CurvatureTriple::new(a, b, c, beta)))?,
                AxisCoefficients::Triple { c1, c2, c3 } => c1
                    .zip_map(c2, |a, b| (a, b))?
                    .zip_map(c3, |(a, b), c| so3_from_coefficients(&CoefficientTriple::new(a, b, c), beta))?,
                AxisCoefficients::Plane(k) => k.map(|v| plane_generator(v, beta)),
            };
            members.push((name.as_str(), f));
        }
        ConnectionSet::new(members)
    }
}

fn check_seed(e: &Mat, beta: Sign) -> Result<()> {
    if !e.is_real(0.0) {
        return Err(Error::NonOrthonormalSeed(f64::INFINITY));
    }
    let d = gram_deviation(e, beta);
    if d > 1e-12 {
        return Err(Error::NonOrthonormalSeed(d));
    }
    Ok(())
}

fn real_part(mut m: Mat) -> Mat {
    for v in m.entries_mut() {
        v.im = 0.0;
    }
    m
}

/// Indefinite Gram–Schmidt: rows become `η`-orthonormal with `e₁·e₁ = β`.
fn reorthonormalize(e: &Mat, beta: Sign) -> Mat {
    let d = e.dim();
    let g = metric(d, beta);
    let ip = |a: &[f64; 3], b: &[f64; 3]| -> f64 {
        (0..d).map(|i| a[i] * b[i] * g.re(i, i)).sum()
    };
    let mut rows: Vec<[f64; 3]> = (0..d).map(|i| e.row_re(i)).collect();
    for i in 0..d {
        for j in 0..i {
            let s = ip(&rows[i], &rows[j]) / ip(&rows[j], &rows[j]);
            let rj = rows[j];
            for (a, b) in rows[i].iter_mut().zip(rj) {
                *a -= s * b;
            }
        }
        let n = ip(&rows[i], &rows[i]).abs().sqrt();
        for a in rows[i].iter_mut() {
            *a /= n;
        }
    }
    let mut out = Mat::zeros(d);
    for (i, r) in rows.iter().enumerate() {
        for j in 0..d {
            out.set(i, j, C64::new(r[j], 0.0));
        }
    }
    out
}

fn step(e: &Mat, a0: &Mat, amid: &Mat, a1: &Mat, h: f64, beta: Sign, stepper: Stepper) -> Mat {
    match stepper {
        Stepper::Exponential => {
            let m = amid.scale_re(h);
            let r = match m.rotation_exp(1e-14) {
                Some(r) => r,
                None => m.expm(),
            };
            let out = r * *e;
            if amid.is_real(0.0) && e.is_real(0.0) {
                real_part(out)
            } else {
                out
            }
        }
        Stepper::Rk4 => {
            let k1 = *a0 * *e;
            let k2 = *amid * (*e + k1.scale_re(0.5 * h));
            let k3 = *amid * (*e + k2.scale_re(0.5 * h));
            let k4 = *a1 * (*e + k3.scale_re(h));
            let out = *e + (k1 + k2.scale_re(2.0) + k3.scale_re(2.0) + k4).scale_re(h / 6.0);
            reorthonormalize(&real_part(out), beta)
        }
    }
}

/// Integrates `E_s = A(s) E` along a 1-D grid from `frame0` at the first
/// node, sampling `A` at the grid nodes (midpoint value = node average).
pub fn integrate_frame_axis(frame0: &Mat, gen: &MatrixField, beta: Sign, stepper: Stepper) -> Result<FrameField> {
    let spec = gen.spec();
    if spec.ndim() != 1 {
        return Err(Error::Invalid(format!(
            "frame line needs a 1-D grid, got {} axes",
            spec.ndim()
        )));
    }
    if gen.dim() != frame0.dim() {
        return Err(Error::DimMismatch(frame0.dim(), gen.dim()));
    }
    check_seed(frame0, beta)?;
    let h = spec.axes()[0].spacing;
    let a = gen.values();
    let mut out = Vec::with_capacity(a.len());
    out.push(*frame0);
    for i in 1..a.len() {
        let mid = (a[i - 1] + a[i]).scale_re(0.5);
        let next = step(&out[i - 1], &a[i - 1], &mid, &a[i], h, beta, stepper);
        out.push(next);
    }
    Ok(FrameField {
        frames: Field::new(spec.clone(), out)?,
        beta,
    })
}

/// Same as [`integrate_frame_axis`] with the generator given as a function of
/// arclength, sampled exactly at step midpoints. Returns `steps + 1` frames.
pub fn integrate_frame_fn(
    frame0: &Mat,
    gen: &dyn Fn(f64) -> Mat,
    s0: f64,
    h: f64,
    steps: usize,
    beta: Sign,
    stepper: Stepper,
) -> Result<Vec<Mat>> {
    check_seed(frame0, beta)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(*frame0);
    let mut e = *frame0;
    for i in 0..steps {
        let s = s0 + h * i as f64;
        e = step(&e, &gen(s), &gen(s + 0.5 * h), &gen(s + h), h, beta, stepper);
        out.push(e);
    }
    Ok(out)
}

/// Fills a multi-axis grid by integrating from `frame0` at the first node
/// along the axes in `order`: first the line along `order[0]`, then every
/// line along `order[1]` starting on it, and so on.
pub fn integrate_frame_grid(
    frame0: &Mat,
    conns: &ConnectionSet,
    order: &[&str],
    beta: Sign,
    stepper: Stepper,
) -> Result<FrameField> {
    let spec = conns.spec().clone();
    if order.len() != spec.ndim() {
        return Err(Error::Invalid(format!(
            "integration order lists {} axes, grid has {}",
            order.len(),
            spec.ndim()
        )));
    }
    check_seed(frame0, beta)?;
    let axes: Vec<usize> = order.iter().map(|a| spec.axis_index(a)).collect::<Result<_>>()?;
    let mut frames = vec![*frame0; spec.len()];
    for (k, (&ax, name)) in axes.iter().zip(order).enumerate() {
        let gen = conns.get(name)?;
        let n = spec.axes()[ax].count;
        let h = spec.axes()[ax].spacing;
        let s = spec.stride(ax);
        for start in spec.line_starts(ax) {
            let idx = spec.multi_index(start);
            if axes[k + 1..].iter().any(|&later| idx[later] != 0) {
                continue;
            }
            for i in 1..n {
                let (p, c) = (start + (i - 1) * s, start + i * s);
                let a0 = gen.values()[p];
                let a1 = gen.values()[c];
                let mid = (a0 + a1).scale_re(0.5);
                frames[c] = step(&frames[p], &a0, &mid, &a1, h, beta, stepper);
            }
        }
    }
    Ok(FrameField {
        frames: Field::new(spec, frames)?,
        beta,
    })
}

/// For each axis pair `(a, b)`: `‖∂_b(A_a E) − ∂_a(A_b E)‖`, the mixed
/// partials of the frame with one derivative replaced through the frame
/// equations. Plain mixed finite differences commute identically on a
/// tensor grid and so cannot detect incompatibility.
pub fn frame_compatibility_residual(frames: &FrameField, conns: &ConnectionSet) -> Result<ResidualReport> {
    let axes = conns.axes();
    if axes.len() < 2 {
        return Err(Error::Invalid("compatibility needs at least two axes".into()));
    }
    if frames.spec() != conns.spec() {
        return Err(Error::GridMismatch);
    }
    let mut rep = ResidualReport::new();
    for i in 0..axes.len() {
        for j in i + 1..axes.len() {
            let (a, b) = (axes[i], axes[j]);
            let ea = conns.get(a)?.mul(&frames.frames)?;
            let eb = conns.get(b)?.mul(&frames.frames)?;
            let r = ea
                .partial(b, Scheme::Central2)?
                .sub(&eb.partial(a, Scheme::Central2)?)?;
            rep.push(&format!("d{b}d{a}E-d{a}d{b}E"), r.norms());
        }
    }
    Ok(rep)
}

/// Solves `E_s = a E_r + C E` on a grid over `(march, transverse)` from the
/// frames on the line `march = first node`. Method of lines: central
/// differences in the transverse direction (periodic), classical RK4 in the
/// marching direction with `C` averaged at step midpoints. With `a = 0` this
/// is [`integrate_frame_axis`] applied line by line.
pub fn integrate_mmlxviii(
    boundary: &[Mat],
    c: &MatrixField,
    a: C64,
    march: &str,
    transverse: &str,
    beta: Sign,
) -> Result<FrameField> {
    if !a.is_finite() {
        return Err(Error::Invalid("advection parameter must be finite".into()));
    }
    if a.im != 0.0 {
        return Err(Error::Invalid(format!(
            "complex advection parameter {a} makes the real transport problem ill-posed"
        )));
    }
    let a = a.re;
    let spec = c.spec().clone();
    if spec.ndim() != 2 {
        return Err(Error::Invalid("advection-rotation solve needs a 2-D grid".into()));
    }
    let mi = spec.axis_index(march)?;
    let ti = spec.axis_index(transverse)?;
    let (mx, tx) = (&spec.axes()[mi], &spec.axes()[ti]);
    if boundary.len() != tx.count {
        return Err(Error::Invalid(format!(
            "boundary line has {} frames, transverse axis has {}",
            boundary.len(),
            tx.count
        )));
    }
    for e in boundary {
        check_seed(e, beta)?;
    }
    let mut frames = vec![boundary[0]; spec.len()];
    let node = |i: usize, j: usize| {
        let mut idx = [0; 2];
        idx[mi] = i;
        idx[ti] = j;
        spec.node(&idx)
    };
    for (j, e) in boundary.iter().enumerate() {
        frames[node(0, j)] = *e;
    }
    let h = mx.spacing;
    if a == 0.0 {
        for j in 0..tx.count {
            for i in 1..mx.count {
                let (p, q) = (node(i - 1, j), node(i, j));
                let (a0, a1) = (c.values()[p], c.values()[q]);
                let mid = (a0 + a1).scale_re(0.5);
                frames[q] = step(&frames[p], &a0, &mid, &a1, h, beta, Stepper::Exponential);
            }
        }
        return Ok(FrameField {
            frames: Field::new(spec, frames)?,
            beta,
        });
    }
    if !tx.is_periodic() {
        return Err(Error::Invalid(
            "transport along a non-periodic transverse axis needs inflow data".into(),
        ));
    }
    let ratio = a.abs() * h / tx.spacing;
    const CFL: f64 = 2.8;
    if ratio > CFL {
        return Err(Error::Cfl { ratio, limit: CFL });
    }
    let nt = tx.count;
    let dr = tx.spacing;
    let rhs = |e: &[Mat], cm: &dyn Fn(usize) -> Mat| -> Vec<Mat> {
        (0..nt)
            .map(|j| {
                let d = (e[(j + 1) % nt] - e[(j + nt - 1) % nt]).scale_re(0.5 / dr);
                d.scale_re(a) + cm(j) * e[j]
            })
            .collect()
    };
    let axpy = |e: &[Mat], k: &[Mat], s: f64| -> Vec<Mat> {
        e.iter().zip(k).map(|(x, y)| *x + y.scale_re(s)).collect()
    };
    let mut cur: Vec<Mat> = boundary.to_vec();
    for i in 1..mx.count {
        let c0 = |j: usize| c.values()[node(i - 1, j)];
        let c1 = |j: usize| c.values()[node(i, j)];
        let cm = |j: usize| (c0(j) + c1(j)).scale_re(0.5);
        let k1 = rhs(&cur, &c0);
        let k2 = rhs(&axpy(&cur, &k1, 0.5 * h), &cm);
        let k3 = rhs(&axpy(&cur, &k2, 0.5 * h), &cm);
        let k4 = rhs(&axpy(&cur, &k3, h), &c1);
        cur = (0..nt)
            .map(|j| {
                real_part(cur[j] + (k1[j] + k2[j].scale_re(2.0) + k3[j].scale_re(2.0) + k4[j]).scale_re(h / 6.0))
            })
            .collect();
        for (j, e) in cur.iter().enumerate() {
            frames[node(i, j)] = *e;
        }
    }
    Ok(FrameField {
        frames: Field::new(spec, frames)?,
        beta,
    })
}

/// Positions `r(s) = ∫ e₁ ds` by cumulative trapezoid from the origin.
pub fn reconstruct_curve(line: &FrameField) -> Result<Vec<[f64; 3]>> {
    let spec = line.spec();
    if spec.ndim() != 1 {
        return Err(Error::Invalid("curve reconstruction needs a 1-D frame line".into()));
    }
    Ok(reconstruct_from_frames(line.frames.values(), spec.axes()[0].spacing))
}

pub fn reconstruct_from_frames(frames: &[Mat], h: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(frames.len());
    let mut r = [0.0; 3];
    out.push(r);
    for w in frames.windows(2) {
        let (a, b) = (w[0].row_re(0), w[1].row_re(0));
        for k in 0..3 {
            r[k] += 0.5 * h * (a[k] + b[k]);
        }
        out.push(r);
    }
    out
}

pub fn write_polyline_csv<W: Write>(points: &[[f64; 3]], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["x", "y", "z"])?;
    for p in points {
        wr.write_record(p.iter().map(|v| format!("{v:?}")))?;
    }
    wr.flush()?;
    Ok(())
}
