//! Execution of each scenario kind on top of the core oracles.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rand::Rng;

use solgeo_core::algebra::{so3_from_triple, CurvatureTriple};
use solgeo_core::fields::{Axis, ConvergenceTable, Field, GridSpec, MatrixField, ResidualReport, Scheme, VectorField};
use solgeo_core::frames::{gram_deviation, integrate_frame_fn, reconstruct_from_frames};
use solgeo_core::manufactured::{rng, EntryKind, GroupField, MatrixSource, Placement, TrigMatrixFn, TrigScalarFn};
use solgeo_core::reductions::{
    chiral_field_residual, embedding_check, named_connection, solve_chiral,
    spin_constraint_deviation, EmbeddingMode, ReductionInputs, ReductionKind, SPIN_CONSTRAINT_TOL,
};
use solgeo_core::sdym::{
    gauge_transform_with, sd_residual_with, GaugeGroupElement, GaugePotential, PotentialSource, PureGaugeSource,
    SelfDualSource, XI,
};
use solgeo_core::spin::{
    helix_field, helix_frequency, helix_phase, lle_connection, lle_integrate, lle_lax_check, spin_from_curvatures,
    LleOptions, SpinNormalization,
};
use solgeo_core::zerocurvature::{mmlxii_residual_with, wavefunction_path_check, ConnectionSet};
use solgeo_core::{Mat, Sign};

use crate::config::{
    DerivativeOrder, EmbedChoice, EmbedParams, FrameParams, GroupChoice, LaxParams, LaxSource, LleParams,
    MmlxiiParams, PotentialChoice, ReductionChoice, ReductionParams, Scenario, SdymParams, SweepParams, Tolerance,
};
use crate::report::{convergence_checks, push_table, Check, EXACT_ZERO};
use crate::CliError;

/// Field data kept from the finest level for export.
#[derive(Clone, Debug)]
pub enum Artifact {
    Matrix(MatrixField),
    Vector(VectorField),
    Polyline(Vec<[f64; 3]>),
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub residuals: ResidualReport,
    pub artifacts: Vec<(String, Artifact)>,
}

impl Outcome {
    fn study(&mut self, label: &str, spacings: &[f64], errors: &[f64], scale: f64, tol: &Tolerance) -> Result<(), CliError> {
        let t = ConvergenceTable::new(label, spacings.to_vec(), errors.to_vec())?;
        self.checks.extend(convergence_checks(&t, scale, tol));
        push_table(&mut self.residuals, t);
        Ok(())
    }

    fn keep(&mut self, keep: bool, name: impl Into<String>, a: impl FnOnce() -> Artifact) {
        if keep {
            self.artifacts.push((name.into(), a()));
        }
    }
}

const XYZT: [&str; 4] = ["x", "y", "z", "t"];

fn e12(dim: usize) -> Mat {
    let mut m = Mat::zeros(dim);
    m.set(0, 1, C64::new(1.0, 0.0));
    m
}

fn group(choice: GroupChoice, seed: u64, dim: usize, ncoords: usize, amp: f64) -> GroupField {
    match choice {
        GroupChoice::Unitary => GroupField::unitary(seed, dim, ncoords, amp),
        GroupChoice::Orthogonal => GroupField::orthogonal(seed, dim, ncoords, amp),
        GroupChoice::NearIdentity => GroupField::near_identity(seed, dim, ncoords, amp),
    }
}

/// Runs the scenario; `keep` retains finest-level fields for export.
pub fn execute(s: &Scenario, seed: u64, tol: &Tolerance, keep: bool) -> Result<Outcome, CliError> {
    match s {
        Scenario::FrameIntegration(p) => frame_integration(p, keep),
        Scenario::MmlxiiCheck(p) => mmlxii_check(p, seed, tol, keep),
        Scenario::SdymCheck(p) => sdym_check(p, seed, tol, keep),
        Scenario::ReductionCheck(p) => reduction_check(p, seed, tol, keep),
        Scenario::Embed2p1(p) => embed_check(p, seed, tol, keep),
        Scenario::LleRun(p) => lle_run(p, tol, keep),
        Scenario::LaxCheck(p) => lax_check(p, seed, tol, keep),
        Scenario::ConvergenceSweep(p) => convergence_sweep(p, seed, tol, keep),
    }
}

fn frame_integration(p: &FrameParams, keep: bool) -> Result<Outcome, CliError> {
    let beta = Sign::from_f64(p.beta)?;
    let h = p.length / p.steps as f64;
    let gen = |s: f64| so3_from_triple(&CurvatureTriple::new(p.k * (1.0 + p.modulation * s.sin()), p.sigma, p.tau, beta));
    let frames = integrate_frame_fn(&Mat::identity(3), &gen, 0.0, h, p.steps, beta, p.stepper)?;
    let drift = frames.iter().map(|e| gram_deviation(e, beta)).fold(0.0, f64::max);
    let mut out = Outcome::default();
    out.residuals.push("gram drift", (drift, drift));
    out.checks.push(Check::at_most(
        "gram drift",
        drift,
        p.gram_tol,
        format!("largest |E eta E^T - eta| over {} steps", p.steps),
    ));
    if p.modulation == 0.0 {
        let exact = (gen(0.0) * p.length).expm();
        let err = (*frames.last().expect("steps > 0") - exact).frobenius();
        out.residuals.push("end frame - exp(sA)", (err, err));
        out.checks.push(Check::at_most(
            "end frame - exp(sA)",
            err,
            p.exact_tol,
            "constant coefficients integrate to the matrix exponential",
        ));
    }
    out.keep(keep, "curve", || Artifact::Polyline(reconstruct_from_frames(&frames, h)));
    Ok(out)
}

fn mmlxii_check(p: &MmlxiiParams, seed: u64, tol: &Tolerance, keep: bool) -> Result<Outcome, CliError> {
    let grp = group(p.group, seed, p.dim, 4, p.amplitude);
    let pl = Placement::new(&XYZT, &p.base);
    let axes: Vec<&str> = p.axes.iter().map(String::as_str).collect();
    let last = *axes.last().expect("validated");
    let kick = e12(p.dim) * p.kick;
    let mut out = Outcome::default();
    let finest = *p.grid.levels.last().expect("validated");
    for i in 0..axes.len() {
        for j in i + 1..axes.len() {
            let (a, b) = (axes[i], axes[j]);
            let label = format!("F[{a},{b}]");
            let (mut hs, mut errs, mut scale) = (Vec::new(), Vec::new(), 0.0);
            for &n in &p.grid.levels {
                let spec = p.grid.spec(&[a, b], n)?;
                let member = |c: &str| -> Result<MatrixField, CliError> {
                    let f = pl.sample_connection(&spec, &grp, c)?;
                    Ok(if c == last && p.kick != 0.0 { f.map(|m| m + kick) } else { f })
                };
                let conns = ConnectionSet::new(vec![(a, member(a)?), (b, member(b)?)])?;
                let rep = mmlxii_residual_with(&conns, p.scheme)?;
                errs.push(rep.max_linf());
                hs.push(spec.max_spacing());
                scale = conns.scale();
                if n == finest {
                    let e = rep.entries.first().expect("one pair");
                    out.residuals.push(&label, (e.linf, e.l2));
                    if i == 0 && j == 1 {
                        for (name, f) in conns.members() {
                            out.keep(keep, format!("A_{name}"), || Artifact::Matrix(f.clone()));
                        }
                    }
                }
            }
            out.study(&label, &hs, &errs, scale, tol)?;
        }
    }
    Ok(out)
}

fn sdym_check(p: &SdymParams, seed: u64, tol: &Tolerance, keep: bool) -> Result<Outcome, CliError> {
    let src: Box<dyn PotentialSource> = match p.source {
        PotentialChoice::PureGauge => Box::new(PureGaugeSource(GroupField::unitary(seed, p.dim, 4, p.amplitude))),
        PotentialChoice::SelfDual => Box::new(SelfDualSource::seeded(seed, p.dim)),
    };
    let phi = GroupField::near_identity(seed ^ 0x9e37_79b9, p.dim, 4, p.gauge);
    let pl = Placement::origin(&XI);
    let labels = ["F[xi1,xi2]", "F[xi3,xi4]", "F[xi1,xi4]-F[xi2,xi3]"];
    let mut errs = vec![Vec::new(); labels.len()];
    let (mut hs, mut scale) = (Vec::new(), 0.0);
    let mut out = Outcome::default();
    let finest = *p.grid.levels.last().expect("validated");
    for &n in &p.grid.levels {
        let spec = p.grid.spec(&XI, n)?;
        let mut pot = GaugePotential::sample(&spec, &pl, src.as_ref())?;
        if p.gauge > 0.0 {
            let el = GaugeGroupElement::new(pl.sample_source(&spec, &phi)?)?;
            pot = gauge_transform_with(&pot, &el, p.scheme)?;
        }
        let rep = sd_residual_with(&pot, p.scheme)?;
        for (k, l) in labels.iter().enumerate() {
            errs[k].push(rep.get(l).map_or(f64::NAN, |e| e.linf));
        }
        hs.push(spec.max_spacing());
        scale = pot.scale();
        if n == finest {
            for e in &rep.entries {
                out.residuals.push(&e.label, (e.linf, e.l2));
            }
            for (name, f) in XI.iter().zip(&pot.components) {
                out.keep(keep, format!("A_{name}"), || Artifact::Matrix(f.clone()));
            }
        }
    }
    for (k, l) in labels.iter().enumerate() {
        out.study(l, &hs, &errs[k], scale, tol)?;
    }
    Ok(out)
}

fn rand_c(r: &mut impl Rng) -> C64 {
    C64::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0))
}

fn reduction_check(p: &ReductionParams, seed: u64, tol: &Tolerance, keep: bool) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let lambdas: Vec<C64> = p.lambdas.iter().map(|l| C64::new(l[0], l[1])).collect();
    let i = C64::new(0.0, 1.0);
    match p.reduction {
        ReductionChoice::ZsAkns | ReductionChoice::Knwki => {
            let (kind, power) = if p.reduction == ReductionChoice::ZsAkns {
                (ReductionKind::ZsAkns, 0)
            } else {
                (ReductionKind::Knwki, 1)
            };
            let spec = GridSpec::closed(&["x"], 3, 0.0, 1.0)?;
            let mut r = rng(seed);
            let mut worst: f64 = 0.0;
            let draws: Vec<Option<C64>> = lambdas.iter().map(|&l| Some(l)).chain((0..p.samples).map(|_| None)).collect();
            for fixed in draws {
                let (pp, qq) = (rand_c(&mut r), rand_c(&mut r));
                let l = fixed.unwrap_or_else(|| rand_c(&mut r));
                let inputs = ReductionInputs::Potentials {
                    p: Field::constant(&spec, pp),
                    q: Field::constant(&spec, qq),
                };
                let u = named_connection(kind, &inputs, l)?;
                let w = l.powi(power);
                let want = Mat::from_entries(2, &[i * l, w * qq, w * pp, -i * l]);
                for m in u.get("x")?.values() {
                    worst = worst.max((*m - want).frobenius() / want.frobenius());
                }
            }
            out.residuals.push("U - closed form (relative)", (worst, worst));
            out.checks.push(Check::at_most(
                "U closed form",
                worst,
                1e-14,
                format!("{} random (p, q, lambda) plus the configured lambdas", p.samples),
            ));
        }
        ReductionChoice::ChiralField => {
            let grid = p.grid.as_ref().expect("validated");
            let mut r = rng(seed);
            let fu = TrigMatrixFn::random(&mut r, 2, 1, 3, 2, p.amplitude, EntryKind::Complex).anti_hermitian();
            let fv = TrigMatrixFn::random(&mut r, 2, 1, 3, 2, p.amplitude, EntryKind::Complex).anti_hermitian();
            let fixed = ["u_t+[u,v]/2", "v_x-[u,v]/2"];
            let mut zc = vec![Vec::new(); lambdas.len()];
            let mut eqs = vec![Vec::new(); fixed.len()];
            let (mut hs, mut scale) = (Vec::new(), 0.0_f64);
            let finest = *grid.levels.last().expect("validated");
            for &n in &grid.levels {
                let spec = grid.spec(&["x", "t"], n)?;
                let (u, v) = solve_chiral(&spec, &|x| fu.eval(&[x]), &|t| fv.eval(&[t]))?;
                let base = u.norms().0.max(v.norms().0);
                for (k, &l) in lambdas.iter().enumerate() {
                    let rep = chiral_field_residual(&u, &v, l)?;
                    zc[k].push(rep.get("zc(lambda)").map_or(f64::NAN, |e| e.linf));
                    if k == 0 {
                        for (m, lab) in fixed.iter().enumerate() {
                            eqs[m].push(rep.get(lab).map_or(f64::NAN, |e| e.linf));
                        }
                    }
                    let w = (1.0 / (1.0 - l)).norm().max((1.0 / (1.0 + l)).norm()).max(1.0);
                    scale = scale.max(base * w);
                    if n == finest {
                        let e = rep.get("zc(lambda)").expect("zc entry");
                        out.residuals.push(&format!("zc(lambda={l})"), (e.linf, e.l2));
                    }
                }
                hs.push(spec.max_spacing());
                if n == finest {
                    out.keep(keep, "u", || Artifact::Matrix(u.clone()));
                    out.keep(keep, "v", || Artifact::Matrix(v.clone()));
                }
            }
            for (k, l) in lambdas.iter().enumerate() {
                out.study(&format!("zc(lambda={l})"), &hs, &zc[k], scale, tol)?;
            }
            for (m, lab) in fixed.iter().enumerate() {
                out.study(lab, &hs, &eqs[m], scale, tol)?;
            }
        }
        ReductionChoice::SpinConstraint => {
            let n_pts = p.grid.as_ref().map_or(64, |g| *g.levels.last().expect("validated"));
            let spec = GridSpec::new(vec![Axis::periodic("x", n_pts, 0.0, TAU)])?;
            let mut r = rng(seed);
            let fa = TrigScalarFn::random(&mut r, 1, 3, 2, 1.0);
            let fb = TrigScalarFn::random(&mut r, 1, 3, 2, 2.0);
            let n = p.n;
            let dir = |c: &[f64]| {
                let (a, b) = (fa.eval(c), fb.eval(c));
                [a.cos() * b.cos(), a.cos() * b.sin(), a.sin()]
            };
            let k = Field::from_fn(&spec, |c| n * dir(c)[0]);
            let sg = Field::from_fn(&spec, |c| n * dir(c)[1]);
            let ta = Field::from_fn(&spec, |c| n * dir(c)[2]);
            let dev = spin_constraint_deviation(&k, &sg, &ta, n)?;
            out.residuals.push("k^2+sigma^2+tau^2-n^2 (relative)", (dev, dev));
            out.checks.push(Check::at_most(
                "spin constraint",
                dev,
                SPIN_CONSTRAINT_TOL,
                "relative deviation from the sphere of radius n",
            ));
            let spin = spin_from_curvatures(&k, &sg, &ta, n)?;
            let want = spin.matrices().scale(SpinNormalization::SuTwo.factor(n));
            let inputs = ReductionInputs::Spin { k, sigma: sg, tau: ta, n };
            let mut worst: f64 = 0.0;
            for &l in &lambdas {
                let u = named_connection(ReductionKind::SpinConstraint, &inputs, l)?;
                worst = worst.max(u.get("x")?.sub(&want)?.norms().0);
            }
            out.residuals.push("U - (n/2i)S", (worst, worst));
            out.checks.push(Check::at_most(
                "U = (n/2i)S",
                worst,
                EXACT_ZERO * n.max(1.0),
                "reduced connection against the su(2)-normalized spin matrix",
            ));
            out.keep(keep, "spin", || Artifact::Vector(spin.field.clone()));
        }
    }
    Ok(out)
}

const IDENTITIES: [&str; 2] = ["F[xi3,xi4]-(i/2)F[x,y]", "F[xi1,xi4]-F[xi2,xi3]-iF[x,t]"];

fn embed_check(p: &EmbedParams, seed: u64, tol: &Tolerance, keep: bool) -> Result<Outcome, CliError> {
    let grp = GroupField::unitary(seed, p.dim, 3, p.amplitude);
    let pl = Placement::origin(&["x", "y", "t"]);
    let mode = match p.mode {
        EmbedChoice::OneForm => EmbeddingMode::OneForm,
        EmbedChoice::Literal => EmbeddingMode::Literal,
    };
    let kick = e12(p.dim) * p.perturb;
    let labels = ["F[xi1,xi2]", "F[xi3,xi4]", "F[xi1,xi4]-F[xi2,xi3]"];
    let mut errs = vec![Vec::new(); labels.len()];
    let (mut hs, mut scale) = (Vec::new(), 0.0_f64);
    let mut out = Outcome::default();
    let finest = *p.grid.levels.last().expect("validated");
    for &n in &p.grid.levels {
        let spec = p.grid.spec(&["x", "y", "t"], n)?;
        let a = pl.sample_connection(&spec, &grp, "x")?;
        let b = pl.sample_connection(&spec, &grp, "y")?;
        let mut d = pl.sample_connection(&spec, &grp, "t")?;
        if p.perturb != 0.0 {
            d = d.map(|m| m + kick);
        }
        scale = a.norms().0.max(b.norms().0).max(d.norms().0);
        let rep = embedding_check(&a, &b, &d, mode, Default::default())?;
        for (k, l) in labels.iter().enumerate() {
            errs[k].push(rep.get(l).map_or(f64::NAN, |e| e.linf));
        }
        hs.push(spec.max_spacing());
        if n == finest {
            let limit = 1e-10 * (1.0 + scale).powi(2);
            for e in &rep.entries {
                out.residuals.push(&e.label, (e.linf, e.l2));
                if IDENTITIES.contains(&e.label.as_str()) {
                    out.checks.push(Check::at_most(
                        &e.label,
                        e.linf,
                        limit,
                        "embedding identity holds to rounding at the finest level",
                    ));
                }
            }
            for w in rep.warnings {
                out.residuals.warn(w);
            }
            for (name, f) in [("A", &a), ("B", &b), ("D", &d)] {
                out.keep(keep, name, || Artifact::Matrix(f.clone()));
            }
        }
    }
    for (k, l) in labels.iter().enumerate() {
        out.study(l, &hs, &errs[k], scale, tol)?;
    }
    Ok(out)
}

fn lle_run(p: &LleParams, tol: &Tolerance, keep: bool) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let w = helix_frequency(p.theta, p.k);
    let (mut hs, mut rate_errs) = (Vec::new(), Vec::new());
    let finest = *p.grid.levels.last().expect("validated");
    for &n in &p.grid.levels {
        let spec = GridSpec::new(vec![Axis::periodic("x", n, 0.0, TAU)])?;
        let h = TAU / n as f64;
        let s0 = helix_field(&spec, p.theta, p.k, 1.0)?;
        let opts = LleOptions {
            record_every: p.record_every,
            ..Default::default()
        };
        let run = lle_integrate(&s0, p.duration, p.dt_factor * h * h, &opts)?;
        let sp = run.spin.spec();
        let last = sp.axes()[1].count - 1;
        let line = run.spin.field.line(0, sp.node(&[0, last]));
        let xs: Vec<f64> = (0..n).map(|i| spec.axes()[0].coord(i)).collect();
        let mut phase = -helix_phase(&line, &xs, p.k);
        while phase < w * p.duration - PI {
            phase += TAU;
        }
        while phase > w * p.duration + PI {
            phase -= TAU;
        }
        let rel = (phase / p.duration - w).abs() / w.abs().max(f64::MIN_POSITIVE);
        hs.push(h);
        rate_errs.push(rel);
        if n == finest {
            out.residuals.push("precession rate (relative)", (rel, rel));
            out.residuals.push("|S| drift", (run.max_norm_drift, run.max_norm_drift));
            out.residuals.push("energy drift (relative)", (run.energy_drift, run.energy_drift));
            out.checks.push(Check::at_most(
                "precession rate",
                rel,
                p.rate_tol,
                format!("against w = k^2 cos(theta) = {w:.9}; {} steps of {:.4e}", run.steps, run.dt),
            ));
            out.checks.push(Check::at_most("|S| drift", run.max_norm_drift, p.norm_tol, "largest ||S| - 1|"));
            out.checks.push(Check::at_most(
                "energy drift",
                run.energy_drift,
                p.energy_tol,
                "relative change of the discrete exchange energy",
            ));
            out.keep(keep, "spin", || Artifact::Vector(run.spin.field.clone()));
        }
    }
    if hs.len() >= 3 {
        let t = ConvergenceTable::new("precession rate", hs, rate_errs)?;
        out.checks.push(Check::at_least(
            "order precession rate",
            t.finest_order(),
            tol.min_order,
            "rate error under refinement with dt proportional to h^2",
        ));
        push_table(&mut out.residuals, t);
    }
    Ok(out)
}

fn path_mismatch(c: &ConnectionSet, order: &[&str]) -> Result<f64, CliError> {
    let dim = c.dim();
    let rep = wavefunction_path_check(c, &Mat::identity(dim), order)?;
    Ok(rep.get("path-mismatch").map_or(f64::NAN, |e| e.linf))
}

fn lax_check(p: &LaxParams, seed: u64, tol: &Tolerance, keep: bool) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let finest = *p.grid.levels.last().expect("validated");
    match p.source {
        LaxSource::Flat => {
            let names = ["x", "y", "t"];
            let grp = GroupField::unitary(seed, p.dim, 3, p.amplitude);
            let pl = Placement::origin(&names);
            let kick = e12(p.dim) * p.kick;
            let (mut hs, mut errs, mut scale) = (Vec::new(), Vec::new(), 0.0);
            for &n in &p.grid.levels {
                let spec = p.grid.spec(&names, n)?;
                let mut members = Vec::new();
                for a in names {
                    let f = pl.sample_connection(&spec, &grp, a)?;
                    members.push((a, if a == "t" && p.kick != 0.0 { f.map(|m| m + kick) } else { f }));
                }
                let c = ConnectionSet::new(members)?;
                let e = path_mismatch(&c, &names)?;
                errs.push(e);
                hs.push(spec.max_spacing());
                scale = c.scale();
                if n == finest {
                    out.residuals.push("path-mismatch", (e, e));
                    for (name, f) in c.members() {
                        out.keep(keep, format!("A_{name}"), || Artifact::Matrix(f.clone()));
                    }
                }
            }
            out.study("path-mismatch", &hs, &errs, scale, tol)?;
        }
        LaxSource::Helix => {
            for &nn in &p.n_values {
                let label = format!("path-mismatch (helix, n={nn})");
                let (mut hs, mut errs, mut scale) = (Vec::new(), Vec::new(), 0.0);
                for &n in &p.grid.levels {
                    let spec = GridSpec::new(vec![Axis::periodic("x", n, 0.0, TAU), p.grid.axis("t", n)])?;
                    let s = helix_field(&spec, p.theta, p.k, nn)?;
                    let rep = lle_lax_check(&s, SpinNormalization::Involutive)?;
                    let e = rep.get("path-mismatch").map_or(f64::NAN, |e| e.linf);
                    errs.push(e);
                    hs.push(spec.max_spacing());
                    let c = lle_connection(&s, SpinNormalization::Involutive)?;
                    scale = c.scale();
                    if n == finest {
                        out.residuals.push(&label, (e, e));
                        if nn == p.n_values[0] {
                            for (name, f) in c.members() {
                                out.keep(keep, format!("A_{name}"), || Artifact::Matrix(f.clone()));
                            }
                        }
                    }
                }
                out.study(&label, &hs, &errs, scale, tol)?;
            }
        }
    }
    Ok(out)
}

fn convergence_sweep(p: &SweepParams, seed: u64, tol: &Tolerance, keep: bool) -> Result<Outcome, CliError> {
    let mut r = rng(seed);
    let f = TrigMatrixFn::random(&mut r, p.dim, 1, 4, 3, p.amplitude, EntryKind::Complex);
    let scheme = match p.scheme {
        Scheme::Central2 => "central2",
        Scheme::Central4 => "central4",
        Scheme::OneSided2 => "one-sided2",
    };
    let label = match p.derivative {
        DerivativeOrder::First => format!("d/dx ({scheme})"),
        DerivativeOrder::Second => format!("d2/dx2 ({scheme})"),
    };
    let (mut hs, mut errs, mut scale) = (Vec::new(), Vec::new(), 0.0);
    let mut out = Outcome::default();
    let finest = *p.grid.levels.last().expect("validated");
    for &n in &p.grid.levels {
        let spec = p.grid.spec(&["x"], n)?;
        let field = Field::from_fn(&spec, |c| f.eval(c));
        let (num, exact) = match p.derivative {
            DerivativeOrder::First => (field.partial("x", p.scheme)?, Field::from_fn(&spec, |c| f.deriv(c, 0))),
            DerivativeOrder::Second => (
                field.second_partial("x", p.scheme)?,
                Field::from_fn(&spec, |c| f.second_deriv(c, 0, 0)),
            ),
        };
        let d = num.sub(&exact)?;
        let (linf, l2) = d.norms();
        errs.push(linf);
        hs.push(spec.max_spacing());
        scale = exact.norms().0;
        if n == finest {
            out.residuals.push(&label, (linf, l2));
            out.keep(keep, "error", || Artifact::Matrix(d.clone()));
        }
    }
    out.study(&label, &hs, &errs, scale, tol)?;
    Ok(out)
}
