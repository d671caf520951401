//! Scenario configuration files (`"schema": 1`).

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use solgeo_core::fields::{Axis, GridSpec, Scheme};
use solgeo_core::frames::Stepper;

use crate::CliError;

pub const SCHEMA: u32 = 1;

/// Largest node count per axis, by grid dimension.
const MAX_COUNT: [usize; 4] = [1 << 16, 2048, 128, 32];
/// Largest number of implicit LLE steps in one run.
const MAX_LLE_STEPS: f64 = 5.0e6;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Tolerance,
    /// Output directory, relative to the working directory.
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub scenario: Scenario,
}

/// Pass criteria shared by every convergence check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerance {
    /// Minimum observed order between the two finest levels.
    pub min_order: f64,
    /// Finest-level L∞ bound as a fraction of the field scale.
    pub rel_linf: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            min_order: 1.9,
            rel_linf: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    #[default]
    Periodic,
    Closed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    /// Nodes per axis at each refinement level, coarsest first.
    pub levels: Vec<usize>,
    #[serde(default)]
    pub boundary: BoundaryKind,
    /// `[lo, hi]`; defaults to `[0, 2π]` periodic and `[0, 1]` closed.
    #[serde(default)]
    pub domain: Option<[f64; 2]>,
}

impl GridParams {
    pub fn domain(&self) -> [f64; 2] {
        self.domain.unwrap_or(match self.boundary {
            BoundaryKind::Periodic => [0.0, TAU],
            BoundaryKind::Closed => [0.0, 1.0],
        })
    }

    pub fn axis(&self, name: &str, n: usize) -> Axis {
        let [lo, hi] = self.domain();
        match self.boundary {
            BoundaryKind::Periodic => Axis::periodic(name, n, lo, hi - lo),
            BoundaryKind::Closed => Axis::closed(name, n, lo, hi),
        }
    }

    pub fn spec(&self, names: &[&str], n: usize) -> Result<GridSpec, CliError> {
        GridSpec::new(names.iter().map(|a| self.axis(a, n)).collect()).map_err(|e| CliError::Config(e.to_string()))
    }

    fn validate(&self, what: &str, ndim: usize, min_levels: usize) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(format!("{what}: {m}")));
        if self.levels.is_empty() {
            return bad("grid has no levels".into());
        }
        if self.levels.len() < min_levels {
            return bad(format!(
                "convergence needs at least {min_levels} grid levels, got {}",
                self.levels.len()
            ));
        }
        if self.levels.windows(2).any(|w| w[1] <= w[0]) {
            return bad(format!("grid levels must increase strictly, got {:?}", self.levels));
        }
        let cap = MAX_COUNT[ndim.clamp(1, 4) - 1];
        for &n in &self.levels {
            if n < 5 {
                return bad(format!("grid level {n} is below the 5-node minimum"));
            }
            if n > cap {
                return bad(format!("grid level {n} exceeds {cap} nodes per axis for a {ndim}-D grid"));
            }
        }
        let [lo, hi] = self.domain();
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return bad(format!("domain [{lo}, {hi}] is empty"));
        }
        Ok(())
    }

    /// `count` levels doubling from the coarsest one; closed grids keep
    /// nested nodes (`n → 2n − 1`).
    pub fn refined(&self, count: usize) -> Result<GridParams, CliError> {
        if count < 3 {
            return Err(CliError::Config(format!(
                "a sweep needs at least 3 levels, got {count}"
            )));
        }
        let base = *self
            .levels
            .first()
            .ok_or_else(|| CliError::Config("grid has no levels".into()))?;
        let mut levels = vec![base];
        for _ in 1..count {
            let last = *levels.last().unwrap();
            levels.push(match self.boundary {
                BoundaryKind::Periodic => 2 * last,
                BoundaryKind::Closed => 2 * last - 1,
            });
        }
        Ok(GridParams { levels, ..self.clone() })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupChoice {
    #[default]
    Unitary,
    Orthogonal,
    NearIdentity,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialChoice {
    #[default]
    PureGauge,
    SelfDual,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionChoice {
    #[default]
    ZsAkns,
    Knwki,
    ChiralField,
    SpinConstraint,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbedChoice {
    #[default]
    OneForm,
    Literal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaxSource {
    #[default]
    Flat,
    Helix,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeOrder {
    #[default]
    First,
    Second,
}

fn d_amp() -> f64 {
    0.5
}
fn d_dim() -> usize {
    2
}
fn d_theta() -> f64 {
    PI / 3.0
}
fn d_one() -> f64 {
    1.0
}
fn d_xyzt() -> Vec<String> {
    ["x", "y", "z", "t"].iter().map(|s| s.to_string()).collect()
}
fn d_base() -> [f64; 4] {
    [0.3, -0.2, 0.5, 0.1]
}
fn d_lambdas() -> Vec<[f64; 2]> {
    vec![[0.5, 0.0], [-0.5, 0.0], [0.0, 2.0]]
}
fn d_samples() -> usize {
    100
}
fn d_n_values() -> Vec<f64> {
    vec![1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameParams {
    /// `+1` for so(3), `−1` for so(1,2).
    #[serde(default = "d_one")]
    pub beta: f64,
    #[serde(default = "d_one")]
    pub k: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub tau: f64,
    /// Relative amplitude of `k(s) = k(1 + m sin s)`.
    #[serde(default)]
    pub modulation: f64,
    pub length: f64,
    pub steps: usize,
    #[serde(default)]
    pub stepper: Stepper,
    /// Bound on the Gram-matrix drift.
    #[serde(default = "FrameParams::d_gram")]
    pub gram_tol: f64,
    /// Bound on the distance to `exp(sA)` for constant coefficients.
    #[serde(default = "FrameParams::d_exact")]
    pub exact_tol: f64,
}

impl FrameParams {
    fn d_gram() -> f64 {
        1e-10
    }
    fn d_exact() -> f64 {
        1e-8
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmlxiiParams {
    pub grid: GridParams,
    #[serde(default = "d_xyzt")]
    pub axes: Vec<String>,
    #[serde(default)]
    pub group: GroupChoice,
    #[serde(default = "d_dim")]
    pub dim: usize,
    #[serde(default = "d_amp")]
    pub amplitude: f64,
    /// Values of the coordinates held fixed on each 2-D slice.
    #[serde(default = "d_base")]
    pub base: [f64; 4],
    /// Constant added to the `(1,2)` entry of the last member.
    #[serde(default)]
    pub kick: f64,
    #[serde(default)]
    pub scheme: Scheme,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdymParams {
    pub grid: GridParams,
    #[serde(default)]
    pub source: PotentialChoice,
    #[serde(default = "d_dim")]
    pub dim: usize,
    #[serde(default = "d_amp")]
    pub amplitude: f64,
    /// Strength of a near-identity gauge transformation applied before the
    /// check; zero skips it.
    #[serde(default)]
    pub gauge: f64,
    #[serde(default)]
    pub scheme: Scheme,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionParams {
    pub reduction: ReductionChoice,
    /// Spectral parameters as `[re, im]`.
    #[serde(default = "d_lambdas")]
    pub lambdas: Vec<[f64; 2]>,
    #[serde(default)]
    pub grid: Option<GridParams>,
    /// Random draws for the closed-form checks.
    #[serde(default = "d_samples")]
    pub samples: usize,
    /// Sphere radius for the spin constraint.
    #[serde(default = "d_one")]
    pub n: f64,
    #[serde(default = "d_amp")]
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedParams {
    pub grid: GridParams,
    #[serde(default)]
    pub mode: EmbedChoice,
    #[serde(default = "d_dim")]
    pub dim: usize,
    #[serde(default = "d_amp")]
    pub amplitude: f64,
    /// Constant added to the `(1,2)` entry of `D`.
    #[serde(default)]
    pub perturb: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LleParams {
    /// Point counts on the periodic line `[0, 2π)`.
    pub grid: GridParams,
    #[serde(default = "d_theta")]
    pub theta: f64,
    /// Integer wave number of the helix.
    #[serde(default = "d_one")]
    pub k: f64,
    pub duration: f64,
    /// `dt = dt_factor · h²`.
    #[serde(default = "LleParams::d_dt")]
    pub dt_factor: f64,
    #[serde(default = "LleParams::d_record")]
    pub record_every: usize,
    #[serde(default = "LleParams::d_rate")]
    pub rate_tol: f64,
    #[serde(default = "LleParams::d_norm")]
    pub norm_tol: f64,
    #[serde(default = "LleParams::d_energy")]
    pub energy_tol: f64,
}

impl LleParams {
    fn d_dt() -> f64 {
        0.25
    }
    fn d_record() -> usize {
        100
    }
    fn d_rate() -> f64 {
        1e-4
    }
    fn d_norm() -> f64 {
        1e-10
    }
    fn d_energy() -> f64 {
        1e-6
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaxParams {
    pub grid: GridParams,
    #[serde(default)]
    pub source: LaxSource,
    /// Spin lengths for the helix source.
    #[serde(default = "d_n_values")]
    pub n_values: Vec<f64>,
    #[serde(default = "d_theta")]
    pub theta: f64,
    #[serde(default = "d_one")]
    pub k: f64,
    #[serde(default = "d_dim")]
    pub dim: usize,
    #[serde(default = "d_amp")]
    pub amplitude: f64,
    /// Constant added to the `(1,2)` entry of the `t` member of the flat
    /// source.
    #[serde(default)]
    pub kick: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    pub grid: GridParams,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub derivative: DerivativeOrder,
    #[serde(default = "d_dim")]
    pub dim: usize,
    #[serde(default = "d_amp")]
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    FrameIntegration(FrameParams),
    MmlxiiCheck(MmlxiiParams),
    SdymCheck(SdymParams),
    ReductionCheck(ReductionParams),
    #[serde(rename = "embed-2p1")]
    Embed2p1(EmbedParams),
    LleRun(LleParams),
    LaxCheck(LaxParams),
    ConvergenceSweep(SweepParams),
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::FrameIntegration(_) => "frame-integration",
            Scenario::MmlxiiCheck(_) => "mmlxii-check",
            Scenario::SdymCheck(_) => "sdym-check",
            Scenario::ReductionCheck(_) => "reduction-check",
            Scenario::Embed2p1(_) => "embed-2p1",
            Scenario::LleRun(_) => "lle-run",
            Scenario::LaxCheck(_) => "lax-check",
            Scenario::ConvergenceSweep(_) => "convergence-sweep",
        }
    }

    pub fn grid_mut(&mut self) -> Option<&mut GridParams> {
        match self {
            Scenario::FrameIntegration(_) => None,
            Scenario::MmlxiiCheck(p) => Some(&mut p.grid),
            Scenario::SdymCheck(p) => Some(&mut p.grid),
            Scenario::ReductionCheck(p) => p.grid.as_mut(),
            Scenario::Embed2p1(p) => Some(&mut p.grid),
            Scenario::LleRun(p) => Some(&mut p.grid),
            Scenario::LaxCheck(p) => Some(&mut p.grid),
            Scenario::ConvergenceSweep(p) => Some(&mut p.grid),
        }
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

fn positive(what: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        err(format!("{what} must be positive and finite, got {v}"))
    }
}

fn dim_in(what: &str, d: usize, lo: usize, hi: usize) -> Result<(), CliError> {
    if (lo..=hi).contains(&d) {
        Ok(())
    } else {
        err(format!("{what}: matrix dimension {d} outside {lo}..={hi}"))
    }
}

impl Config {
    /// Parses without validating, so command-line overrides can be applied
    /// first; see [`crate::prepare`].
    pub fn from_path(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Config::parse(&text)?;
        if cfg.name.is_none() {
            cfg.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Config, CliError> {
        let cfg = Config::parse(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn parse(text: &str) -> Result<Config, CliError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        match v.get("schema").and_then(|s| s.as_u64()) {
            Some(s) if s == SCHEMA as u64 => {}
            Some(s) => return err(format!("unsupported schema {s}, expected {SCHEMA}")),
            None => return err("missing integer field `schema`"),
        }
        serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("scenario")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        positive("tolerance.rel_linf", self.tolerance.rel_linf)?;
        if !self.tolerance.min_order.is_finite() {
            return err("tolerance.min_order must be finite");
        }
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) {
                return err(format!("invalid scenario name `{name}`"));
            }
        }
        let kind = self.scenario.kind();
        match &self.scenario {
            Scenario::FrameIntegration(p) => {
                if p.beta != 1.0 && p.beta != -1.0 {
                    return err(format!("{kind}: beta must be 1 or -1, got {}", p.beta));
                }
                positive("length", p.length)?;
                if p.steps == 0 || p.steps > 10_000_000 {
                    return err(format!("{kind}: steps must lie in 1..=1e7, got {}", p.steps));
                }
                for (w, v) in [("k", p.k), ("sigma", p.sigma), ("tau", p.tau), ("modulation", p.modulation)] {
                    if !v.is_finite() {
                        return err(format!("{kind}: {w} is not finite"));
                    }
                }
                positive("gram_tol", p.gram_tol)?;
                positive("exact_tol", p.exact_tol)?;
            }
            Scenario::MmlxiiCheck(p) => {
                p.grid.validate(kind, 2, 3)?;
                if p.axes.len() < 2 {
                    return err(format!("{kind}: need at least two axes"));
                }
                for (i, a) in p.axes.iter().enumerate() {
                    if !["x", "y", "z", "t"].contains(&a.as_str()) {
                        return err(format!("{kind}: unknown axis `{a}` (expected x, y, z or t)"));
                    }
                    if p.axes[..i].contains(a) {
                        return err(format!("{kind}: axis `{a}` listed twice"));
                    }
                }
                let hi = if p.group == GroupChoice::Orthogonal { 3 } else { 4 };
                dim_in(kind, p.dim, 2, hi)?;
                if p.group == GroupChoice::Orthogonal && p.dim != 3 {
                    return err(format!("{kind}: orthogonal group uses dim 3"));
                }
                positive("amplitude", p.amplitude)?;
                if p.kick != 0.0 && p.dim < 2 {
                    return err(format!("{kind}: kick needs dim ≥ 2"));
                }
            }
            Scenario::SdymCheck(p) => {
                p.grid.validate(kind, 4, 3)?;
                dim_in(kind, p.dim, 2, 3)?;
                positive("amplitude", p.amplitude)?;
                if !(0.0..1.0).contains(&p.gauge) {
                    return err(format!("{kind}: gauge strength must lie in [0, 1), got {}", p.gauge));
                }
            }
            Scenario::ReductionCheck(p) => {
                if p.lambdas.is_empty() {
                    return err(format!("{kind}: empty lambda list"));
                }
                if p.lambdas.iter().flatten().any(|v| !v.is_finite()) {
                    return err(format!("{kind}: lambda values must be finite"));
                }
                match p.reduction {
                    ReductionChoice::ZsAkns | ReductionChoice::Knwki => {
                        if p.samples == 0 {
                            return err(format!("{kind}: samples must be positive"));
                        }
                    }
                    ReductionChoice::ChiralField => {
                        let g = p
                            .grid
                            .as_ref()
                            .ok_or_else(|| CliError::Config(format!("{kind}: chiral-field needs `grid`")))?;
                        if g.boundary != BoundaryKind::Closed {
                            return err(format!("{kind}: chiral-field solves a Goursat problem on a closed grid"));
                        }
                        g.validate(kind, 2, 3)?;
                        for l in &p.lambdas {
                            if l[1] == 0.0 && (l[0] == 1.0 || l[0] == -1.0) {
                                return err(format!("{kind}: lambda = {} is a pole of the chiral connection", l[0]));
                            }
                        }
                        positive("amplitude", p.amplitude)?;
                    }
                    ReductionChoice::SpinConstraint => {
                        positive("n", p.n)?;
                        if let Some(g) = &p.grid {
                            g.validate(kind, 1, 1)?;
                        }
                    }
                }
            }
            Scenario::Embed2p1(p) => {
                p.grid.validate(kind, 3, 3)?;
                dim_in(kind, p.dim, 2, 4)?;
                positive("amplitude", p.amplitude)?;
                if !p.perturb.is_finite() {
                    return err(format!("{kind}: perturb is not finite"));
                }
            }
            Scenario::LleRun(p) => {
                p.grid.validate(kind, 1, 1)?;
                if p.grid.boundary != BoundaryKind::Periodic || p.grid.domain.is_some() {
                    return err(format!("{kind}: the helix lives on the periodic line [0, 2π)"));
                }
                if p.k.fract() != 0.0 || p.k == 0.0 {
                    return err(format!("{kind}: wave number k must be a nonzero integer, got {}", p.k));
                }
                positive("duration", p.duration)?;
                positive("dt_factor", p.dt_factor)?;
                if p.record_every == 0 {
                    return err(format!("{kind}: record_every must be positive"));
                }
                positive("rate_tol", p.rate_tol)?;
                positive("norm_tol", p.norm_tol)?;
                positive("energy_tol", p.energy_tol)?;
                let finest = *p.grid.levels.last().unwrap() as f64;
                let h = TAU / finest;
                let steps = p.duration / (p.dt_factor * h * h);
                if steps > MAX_LLE_STEPS {
                    return err(format!(
                        "{kind}: {steps:.3e} time steps at the finest level exceed {MAX_LLE_STEPS:e}"
                    ));
                }
            }
            Scenario::LaxCheck(p) => {
                let nd = if p.source == LaxSource::Flat { 3 } else { 2 };
                p.grid.validate(kind, nd, 3)?;
                if p.source == LaxSource::Helix {
                    if p.n_values.is_empty() {
                        return err(format!("{kind}: empty n_values"));
                    }
                    for &n in &p.n_values {
                        positive("n", n)?;
                    }
                    if p.k.fract() != 0.0 {
                        return err(format!("{kind}: wave number k must be an integer, got {}", p.k));
                    }
                } else {
                    dim_in(kind, p.dim, 2, 4)?;
                    positive("amplitude", p.amplitude)?;
                }
            }
            Scenario::ConvergenceSweep(p) => {
                p.grid.validate(kind, 1, 3)?;
                if p.grid.boundary != BoundaryKind::Periodic || p.grid.domain.is_some() {
                    return err(format!("{kind}: the manufactured field is 2π-periodic; use the default periodic grid"));
                }
                dim_in(kind, p.dim, 1, 4)?;
                positive("amplitude", p.amplitude)?;
            }
        }
        Ok(())
    }
}
