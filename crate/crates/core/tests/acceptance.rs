//! Acceptance gate: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit on
//! any failure. Lines marked `[INFO]` are diagnostics and never gate.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::Rng;

use solgeo_core::algebra::{so3_from_triple, CurvatureTriple};
use solgeo_core::fields::{Axis, ConvergenceTable, Field, GridSpec, MatrixField, Scheme};
use solgeo_core::frames::{
    gram_deviation, integrate_frame_axis, integrate_frame_fn, reconstruct_curve, reconstruct_from_frames, Stepper,
};
use solgeo_core::manufactured::{rng, GroupField, Placement, TrigMatrixFn, TrigScalarFn, EntryKind};
use solgeo_core::reductions::{
    chiral_field_residual, embed_2p1_into_sdym, named_connection, pullback_connection, solve_chiral, CoordinateMap,
    EmbeddingMode, PotentialInput, ReductionInputs, ReductionKind,
};
use solgeo_core::sdym::{field_strength, sd_residual, GaugePotential, PureGaugeSource, SelfDualSource, XI};
use solgeo_core::spin::{
    discrete_helix_frequency, frame_pair_residual, gauge_frame_transform, helix_field, helix_frequency, helix_phase,
    lle_integrate, lle_lax_check, m0_equivalence_residual, LleOptions, SpinField, SpinNormalization,
};
use solgeo_core::zerocurvature::{mmlxii_residual, wavefunction_path_check, ConnectionSet};
use solgeo_core::{Error, Mat, Sign, Vec3};

const XYZT: [&str; 4] = ["x", "y", "z", "t"];
const BASE: [f64; 4] = [0.3, -0.2, 0.5, 0.1];

struct Gate {
    failed: usize,
    total: usize,
}

impl Gate {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        self.total += 1;
        if !pass {
            self.failed += 1;
        }
        println!("[{}] {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    }

    fn info(&self, id: &str, detail: String) {
        println!("[INFO] {id}: {detail}");
    }
}

fn table(label: &str, h: &[f64], e: &[f64]) -> ConvergenceTable {
    ConvergenceTable::new(label, h.to_vec(), e.to_vec()).expect("three levels")
}

fn fmt_orders(t: &ConvergenceTable) -> String {
    let o: Vec<String> = t
        .orders
        .iter()
        .map(|o| o.map_or("NA".into(), |v| format!("{v:.3}")))
        .collect();
    let e: Vec<String> = t.errors.iter().map(|v| format!("{v:.3e}")).collect();
    format!("errors [{}] orders [{}]", e.join(", "), o.join(", "))
}

fn order_near_two(t: &ConvergenceTable) -> bool {
    t.finest_order().is_some_and(|o| (o - 2.0).abs() <= 0.2)
}

fn slice(names: &[&str], n: usize, periodic: bool) -> GridSpec {
    GridSpec::new(
        names
            .iter()
            .map(|a| if periodic { Axis::periodic(a, n, 0.0, TAU) } else { Axis::closed(a, n, -0.5, 0.5) })
            .collect(),
    )
    .unwrap()
}

fn pairs() -> Vec<(&'static str, &'static str)> {
    let mut v = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            v.push((XYZT[i], XYZT[j]));
        }
    }
    v
}

fn criterion1(g: &mut Gate) {
    let start = Instant::now();
    let grp = GroupField::unitary(20240601, 2, 4, 0.5);
    let pl = Placement::new(&XYZT, &BASE);
    let levels = [64usize, 128, 256];
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    for (a, b) in pairs() {
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        let mut scale = 0.0;
        for &n in &levels {
            let spec = slice(&[a, b], n, true);
            let conns = ConnectionSet::new(vec![
                (a, pl.sample_connection(&spec, &grp, a).unwrap()),
                (b, pl.sample_connection(&spec, &grp, b).unwrap()),
            ])
            .unwrap();
            errs.push(mmlxii_residual(&conns).unwrap().max_linf());
            hs.push(spec.max_spacing());
            scale = conns.scale();
        }
        let t = table(&format!("F[{a},{b}]"), &hs, &errs);
        let ratio = t.finest_error() / scale;
        worst_ratio = worst_ratio.max(ratio);
        let pass = order_near_two(&t) && ratio <= 1e-4;
        ok &= pass;
        g.info(
            "C1",
            format!("F[{a},{b}] {} | finest/scale {ratio:.3e}", fmt_orders(&t)),
        );
    }
    let secs = start.elapsed().as_secs_f64();
    // Diagnostic only: the bound sits at (kh)²/6 of the fundamental mode, so
    // the ratio tracks how much harmonic content g carries.
    for (label, alt) in [
        ("near-identity g (eps 0.05)", GroupField::near_identity(20240601, 2, 4, 0.05)),
        ("unitary g (amp 1.0)", GroupField::unitary(20240601, 2, 4, 1.0)),
    ] {
        let spec = slice(&["y", "z"], 256, true);
        let conns = ConnectionSet::new(vec![
            ("y", pl.sample_connection(&spec, &alt, "y").unwrap()),
            ("z", pl.sample_connection(&spec, &alt, "z").unwrap()),
        ])
        .unwrap();
        let r = mmlxii_residual(&conns).unwrap().max_linf() / conns.scale();
        g.info("C1", format!("{label}: F[y,z] finest/scale {r:.3e} at 256²"));
    }
    g.check(
        "C1 manufactured flatness",
        ok && secs <= 60.0,
        format!("six residuals order 2.0±0.2, worst finest L∞/scale {worst_ratio:.3e} (≤1e-4), {secs:.1}s (≤60s)"),
    );
}

fn flat_2p1(n: usize, grp: &GroupField) -> (MatrixField, MatrixField, MatrixField) {
    let spec = GridSpec::periodic(&["x", "y", "t"], n, TAU).unwrap();
    let pl = Placement::origin(&["x", "y", "t"]);
    let f = |a| pl.sample_connection(&spec, grp, a).unwrap();
    (f("x"), f("y"), f("t"))
}

fn criterion2(g: &mut Gate) {
    let grp = GroupField::unitary(77, 2, 3, 0.5);
    let levels = [16usize, 32, 64];
    let labels = ["F[xi1,xi2]", "F[xi3,xi4]", "F[xi1,xi4]-F[xi2,xi3]"];
    let c = Mat::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
    let mut clean = vec![Vec::new(); 3];
    let mut pert = Vec::new();
    let mut hs = Vec::new();
    let mut scale: f64 = 0.0;
    for &n in &levels {
        let (a, b, d) = flat_2p1(n, &grp);
        scale = scale.max(a.norms().0).max(b.norms().0).max(d.norms().0);
        let rep = sd_residual(&embed_2p1_into_sdym(&a, &b, &d, EmbeddingMode::OneForm).unwrap()).unwrap();
        for (k, l) in labels.iter().enumerate() {
            clean[k].push(rep.get(l).unwrap().linf);
        }
        let dp = d.map(|m| m + c * 0.1);
        let rp = sd_residual(&embed_2p1_into_sdym(&a, &b, &dp, EmbeddingMode::OneForm).unwrap()).unwrap();
        pert.push(rp.max_linf());
        hs.push(TAU / n as f64);
    }
    let mut ok = true;
    for (k, l) in labels.iter().enumerate() {
        let t = table(l, &hs, &clean[k]);
        // F[xi1,xi2] cancels identically in the embedding.
        let exact = clean[k].iter().all(|&e| e <= 1e-13 * scale);
        ok &= exact || order_near_two(&t);
        g.info("C2", format!("{l} {}{}", fmt_orders(&t), if exact { " (zero to rounding)" } else { "" }));
    }
    let tp = table("perturbed", &hs, &pert);
    let control = tp.finest_order().map_or(false, |o| o.abs() < 0.5) && tp.finest_error() > 1e-3;
    g.info("C2", format!("perturbed D {}", fmt_orders(&tp)));
    g.check(
        "C2 SDYM embedding",
        ok && control,
        format!("self-duality residuals order 2.0±0.2; perturbed-D control stalls (order {:.3})", tp.finest_order().unwrap_or(f64::NAN)),
    );
}

fn criterion3(g: &mut Gate) {
    let src = PureGaugeSource(GroupField::unitary(31, 2, 4, 0.5));
    let h = CoordinateMap::random_linear(4242, 1.5);
    let CoordinateMap::Linear(hm) = &h else { unreachable!() };
    let det = hm.determinant();
    let levels = [64usize, 128, 256];
    let mut ok = true;
    for (a, b) in pairs() {
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for &n in &levels {
            let spec = slice(&[a, b], n, false);
            let pb = pullback_connection(PotentialInput::Analytic(&src), &h, &spec, &[0.1, 0.2, -0.1, 0.05]).unwrap();
            errs.push(mmlxii_residual(&pb).unwrap().max_linf());
            hs.push(spec.max_spacing());
        }
        let t = table(&format!("F[{a},{b}]"), &hs, &errs);
        ok &= order_near_two(&t);
        g.info("C3", format!("F[{a},{b}] {}", fmt_orders(&t)));
    }
    g.check(
        "C3 coordinate pullback",
        ok,
        format!("pure-gauge self-dual potential through random H (det {det:.3}): six pulled-back residuals order 2.0±0.2"),
    );
    let sd = SelfDualSource::seeded(5, 2);
    let e: Vec<f64> = [64usize, 128]
        .iter()
        .map(|&n| {
            let spec = slice(&["x", "y"], n, false);
            let pb = pullback_connection(PotentialInput::Analytic(&sd), &h, &spec, &[0.0; 4]).unwrap();
            mmlxii_residual(&pb).unwrap().max_linf()
        })
        .collect();
    g.info(
        "C3",
        format!("non-flat self-dual potential pulled back: F[x,y] L∞ {:.3e} -> {:.3e} (does not vanish)", e[0], e[1]),
    );
}

fn criterion4(g: &mut Gate) {
    let mut r = rng(99);
    let fu = TrigMatrixFn::random(&mut r, 2, 1, 3, 2, 0.6, EntryKind::Complex).anti_hermitian();
    let fv = TrigMatrixFn::random(&mut r, 2, 1, 3, 2, 0.6, EntryKind::Complex).anti_hermitian();
    use solgeo_core::manufactured::MatrixSource;
    let lambdas = [C64::new(0.5, 0.0), C64::new(-0.5, 0.0), C64::new(0.0, 2.0)];
    let levels = [33usize, 65, 129];
    let mut errs = vec![Vec::new(); lambdas.len()];
    let mut hs = Vec::new();
    let mut pole_ok = true;
    for &n in &levels {
        let spec = GridSpec::closed(&["x", "t"], n, 0.0, 1.0).unwrap();
        let (u, v) = solve_chiral(&spec, &|x| fu.eval(&[x]), &|t| fv.eval(&[t])).unwrap();
        for (k, &l) in lambdas.iter().enumerate() {
            errs[k].push(chiral_field_residual(&u, &v, l).unwrap().get("zc(lambda)").unwrap().linf);
        }
        for l in [1.0, -1.0] {
            pole_ok &= matches!(chiral_field_residual(&u, &v, C64::new(l, 0.0)), Err(Error::Pole(_)));
        }
        hs.push(spec.max_spacing());
    }
    let mut ok = true;
    for (k, l) in lambdas.iter().enumerate() {
        let t = table("zc", &hs, &errs[k]);
        ok &= order_near_two(&t);
        g.info("C4", format!("lambda={l} {}", fmt_orders(&t)));
    }
    g.check(
        "C4 chiral-field lambda uniformity",
        ok && pole_ok,
        format!("order 2.0±0.2 at lambda in {{0.5,-0.5,2i}}; poles at ±1 rejected: {pole_ok}"),
    );
}

fn criterion5(g: &mut Gate) {
    let mut r = rng(5);
    let spec = GridSpec::closed(&["x"], 3, 0.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut c = || C64::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let (p, q, l) = (c(), c(), c());
        let inp = ReductionInputs::Potentials {
            p: Field::constant(&spec, p),
            q: Field::constant(&spec, q),
        };
        let u = named_connection(ReductionKind::ZsAkns, &inp, l).unwrap();
        let i = C64::new(0.0, 1.0);
        let want = Mat::from_entries(2, &[i * l, q, p, -i * l]);
        for m in u.get("x").unwrap().values() {
            worst = worst.max((*m - want).frobenius() / want.frobenius());
        }
    }
    g.check(
        "C5 ZS-AKNS closed form",
        worst <= 1e-15,
        format!("100 random (p,q,lambda), worst relative deviation {worst:.2e} (≤1e-15)"),
    );
}

fn criterion6(g: &mut Gate) {
    let start = Instant::now();
    let n = 256;
    let spec = GridSpec::periodic(&["x"], n, TAU).unwrap();
    let h = spec.axes()[0].spacing;
    let (theta, k, t_final) = (PI / 3.0, 1.0, 5.0);
    let s0 = helix_field(&spec, theta, k, 1.0).unwrap();
    let run = lle_integrate(&s0, t_final, h * h / 4.0, &LleOptions { record_every: 2000, ..Default::default() }).unwrap();
    let sp = run.spin.spec();
    let last = sp.axes()[1].count - 1;
    let line = run.spin.field.line(0, sp.node(&[0, last]));
    let xs: Vec<f64> = (0..n).map(|i| spec.axes()[0].coord(i)).collect();
    let w = helix_frequency(theta, k);
    let mut phase = -helix_phase(&line, &xs, k);
    while phase < w * t_final - PI {
        phase += TAU;
    }
    let rate = phase / t_final;
    let rel = (rate - w).abs() / w;
    g.info(
        "C6",
        format!(
            "{} steps, dt {:.3e}; measured rate {rate:.9}, exact {w:.9}, semi-discrete {:.9}; {:.1}s",
            run.steps,
            run.dt,
            discrete_helix_frequency(theta, k, h),
            start.elapsed().as_secs_f64()
        ),
    );
    g.check(
        "C6 LLE helical wave",
        rel <= 1e-4 && run.max_norm_drift <= 1e-10 && run.energy_drift <= 1e-6,
        format!(
            "rate rel. error {rel:.3e} (≤1e-4), |S| drift {:.2e} (≤1e-10), energy drift {:.2e} (≤1e-6)",
            run.max_norm_drift, run.energy_drift
        ),
    );
}

fn random_spin(spec: &GridSpec, seed: u64) -> SpinField {
    let mut r = rng(seed);
    let fs: Vec<TrigScalarFn> = (0..3).map(|_| TrigScalarFn::random(&mut r, 2, 3, 1, 0.5)).collect();
    let f = Field::from_fn(spec, |c| {
        let v = Vec3::new(1.0 + fs[0].eval(c), fs[1].eval(c), 0.5 + fs[2].eval(c));
        v * (1.0 / v.norm())
    });
    SpinField::new(f, 1.0).unwrap()
}

fn criterion7(g: &mut Gate) {
    let mut d = Vec::new();
    let mut off = Vec::new();
    let mut hs = Vec::new();
    for n in [32usize, 64, 128] {
        let spec = GridSpec::periodic(&["x", "t"], n, TAU).unwrap();
        let rep = m0_equivalence_residual(&random_spin(&spec, 2024)).unwrap();
        d.push(rep.get("difference").unwrap().linf);
        off.push(rep.get("S_t-[S,S_xx]/2i").unwrap().linf);
        hs.push(TAU / n as f64);
    }
    let t = table("difference", &hs, &d);
    g.info("C7", format!("difference {} | LLE residual itself ~{:.3}", fmt_orders(&t), off[2]));
    g.check(
        "C7 off-shell M-0 identity",
        t.finest_order().is_some_and(|o| o >= 1.9),
        format!("difference order {:.3} (≥1.9)", t.finest_order().unwrap_or(f64::NAN)),
    );
}

fn path_mismatch(c: &ConnectionSet, order: &[&str]) -> f64 {
    wavefunction_path_check(c, &Mat::identity(2), order).unwrap().get("path-mismatch").unwrap().linf
}

fn criterion8(g: &mut Gate) {
    let grp = GroupField::unitary(808, 2, 3, 0.5);
    let pl = Placement::origin(&["x", "y", "t"]);
    let kick = Mat::from_real(2, &[0.0, 1.0, 0.0, 0.0]) * 0.2;
    let mut flat = Vec::new();
    let mut broken = Vec::new();
    let mut hs = Vec::new();
    // Closed grids: on a full period the enclosed curvature of the control
    // integrates to nearly zero and the control would be degenerate.
    for n in [17usize, 33, 65] {
        let spec = GridSpec::closed(&["x", "y", "t"], n, 0.0, 1.0).unwrap();
        let mut c = ConnectionSet::new(
            ["x", "y", "t"].iter().map(|a| (*a, pl.sample_connection(&spec, &grp, a).unwrap())).collect(),
        )
        .unwrap();
        flat.push(path_mismatch(&c, &["x", "y", "t"]));
        let t = c.get("t").unwrap().map(|m| m + kick);
        c.replace("t", t).unwrap();
        broken.push(path_mismatch(&c, &["x", "y", "t"]));
        hs.push(spec.max_spacing());
    }
    let tf = table("flat", &hs, &flat);
    let tb = table("broken", &hs, &broken);
    g.info("C8", format!("flat manufactured {}", fmt_orders(&tf)));
    g.info("C8", format!("non-flat control {}", fmt_orders(&tb)));
    let mut ok = tf.finest_order().is_some_and(|o| o >= 1.8);
    let control = tb.finest_order().map_or(false, |o| o.abs() < 0.5) && tb.finest_error() > 1e-2;
    for nn in [0.5, 1.0, 2.0] {
        let mut e = Vec::new();
        let mut hs = Vec::new();
        for n in [32usize, 64, 128] {
            let spec = GridSpec::new(vec![Axis::periodic("x", n, 0.0, TAU), Axis::closed("t", n, 0.0, 1.0)]).unwrap();
            let s = helix_field(&spec, PI / 3.0, 1.0, nn).unwrap();
            e.push(lle_lax_check(&s, SpinNormalization::Involutive).unwrap().get("path-mismatch").unwrap().linf);
            hs.push(spec.max_spacing());
        }
        let t = table("helix", &hs, &e);
        ok &= t.finest_order().is_some_and(|o| o >= 1.8);
        g.info("C8", format!("LLE helix n={nn} {}", fmt_orders(&t)));
    }
    g.check(
        "C8 Lax path independence",
        ok && control,
        format!("flat and helix mismatch order ≥1.8; non-flat control stalls (order {:.3})", tb.finest_order().unwrap_or(f64::NAN)),
    );
}

fn criterion9(g: &mut Gate) {
    let src = PureGaugeSource(GroupField::unitary(909, 2, 4, 0.5));
    let mut e = Vec::new();
    let mut hs = Vec::new();
    for n in [9usize, 13, 17] {
        let spec = GridSpec::closed(&XI, n, 0.0, 1.0).unwrap();
        let pot = GaugePotential::sample(&spec, &Placement::origin(&XI), &src).unwrap();
        e.push(field_strength(&pot).unwrap().max_norm());
        hs.push(spec.max_spacing());
    }
    let tf = table("F", &hs, &e);
    g.info("C9", format!("pure-gauge field strength {}", fmt_orders(&tf)));

    let grp = GroupField::unitary(910, 2, 2, 0.5);
    let phi = GroupField::near_identity(911, 2, 2, 0.3);
    let pl = Placement::origin(&["x", "t"]);
    let (mut before, mut after, mut hs2) = (Vec::new(), Vec::new(), Vec::new());
    for n in [32usize, 64, 128] {
        let spec = GridSpec::periodic(&["x", "t"], n, TAU).unwrap();
        let c = pl.sample_connection(&spec, &grp, "x").unwrap();
        let gg = pl.sample_connection(&spec, &grp, "t").unwrap();
        let el = solgeo_core::sdym::GaugeGroupElement::new(pl.sample_source(&spec, &phi).unwrap()).unwrap();
        before.push(frame_pair_residual(&c, &gg, Scheme::Central2).unwrap().norms().0);
        let (c2, g2) = gauge_frame_transform(&c, &gg, &el, Scheme::Central2).unwrap();
        after.push(frame_pair_residual(&c2, &g2, Scheme::Central2).unwrap().norms().0);
        hs2.push(TAU / n as f64);
    }
    let tb = table("before", &hs2, &before);
    let ta = table("after", &hs2, &after);
    g.info("C9", format!("flat pair {}", fmt_orders(&tb)));
    g.info("C9", format!("gauge-transformed pair {}", fmt_orders(&ta)));
    let shift = match (tb.finest_order(), ta.finest_order()) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => f64::INFINITY,
    };
    g.check(
        "C9 gauge covariance",
        order_near_two(&tf) && shift <= 0.2,
        format!(
            "pure-gauge F order {:.3} (2.0±0.2); order shift under gauge transform {shift:.3} (≤0.2)",
            tf.finest_order().unwrap_or(f64::NAN)
        ),
    );
}

fn criterion10(g: &mut Gate) {
    let kf = |s: f64| so3_from_triple(&CurvatureTriple::new(1.0 + 0.5 * s.sin(), 0.3 * (2.0 * s).cos(), 0.8, Sign::Plus));
    let fr = integrate_frame_fn(&Mat::identity(3), &kf, 0.0, 1e-3, 10_000, Sign::Plus, Stepper::Exponential).unwrap();
    let drift = fr.iter().map(|e| gram_deviation(e, Sign::Plus)).fold(0.0, f64::max);

    let spec = GridSpec::closed(&["x"], 10_001, 0.0, TAU).unwrap();
    let gen = Field::constant(&spec, so3_from_triple(&CurvatureTriple::new(1.0, 0.0, 0.0, Sign::Plus)));
    let circle = integrate_frame_axis(&Mat::identity(3), &gen, Sign::Plus, Stepper::Exponential).unwrap();
    let pts = reconstruct_curve(&circle).unwrap();
    let circ_err = pts
        .iter()
        .map(|p| ((p[0].powi(2) + (p[1] - 1.0).powi(2)).sqrt() - 1.0).abs().max(p[2].abs()))
        .fold(0.0, f64::max);

    let (k, tau) = (1.5, 0.8);
    let c2: f64 = k * k + tau * tau;
    let hg = |_s: f64| so3_from_triple(&CurvatureTriple::new(k, 0.0, tau, Sign::Plus));
    let steps = 20_000;
    let h = TAU / c2.sqrt() / steps as f64;
    let fr = integrate_frame_fn(&Mat::identity(3), &hg, 0.0, h, steps, Sign::Plus, Stepper::Exponential).unwrap();
    let hp = reconstruct_from_frames(&fr, h);
    let rho = k / c2;
    let axis: Vec<f64> = (0..3).map(|j| (tau * fr[0].re(0, j) + k * fr[0].re(2, j)) / c2.sqrt()).collect();
    let centre: Vec<f64> = (0..3).map(|j| hp[0][j] + rho * fr[0].re(1, j)).collect();
    let mut radius_err: f64 = 0.0;
    for p in &hp {
        let d: Vec<f64> = (0..3).map(|j| p[j] - centre[j]).collect();
        let along: f64 = (0..3).map(|j| d[j] * axis[j]).sum();
        let perp = (d.iter().map(|v| v * v).sum::<f64>() - along * along).sqrt();
        radius_err = radius_err.max((perp - rho).abs());
    }
    let end = hp.last().unwrap();
    let rise: f64 = (0..3).map(|j| end[j] * axis[j]).sum();
    let pitch_err = (rise - TAU * tau / c2).abs();
    g.check(
        "C10 frame integrity",
        drift <= 1e-10 && circ_err <= 1e-6 && radius_err <= 1e-6 && pitch_err <= 1e-6,
        format!(
            "Gram drift {drift:.2e} over 1e4 steps (≤1e-10); circle {circ_err:.2e}, helix radius {radius_err:.2e}, pitch {pitch_err:.2e} (≤1e-6)"
        ),
    );
}

fn main() -> ExitCode {
    let mut g = Gate { failed: 0, total: 0 };
    let start = Instant::now();
    criterion1(&mut g);
    criterion2(&mut g);
    criterion3(&mut g);
    criterion4(&mut g);
    criterion5(&mut g);
    criterion6(&mut g);
    criterion7(&mut g);
    criterion8(&mut g);
    criterion9(&mut g);
    criterion10(&mut g);
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        g.total - g.failed,
        g.total,
        start.elapsed().as_secs_f64()
    );
    if g.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
