//! Machine-readable scenario reports and their on-disk layout.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use solgeo_core::fields::{ConvergenceTable, ResidualReport};

use crate::config::{Scenario, Tolerance, SCHEMA};
use crate::CliError;

/// Errors at or below this multiple of the field scale count as exact zeros.
pub const EXACT_ZERO: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    /// Measured quantity; `None` when it is undefined (order of an exact
    /// zero).
    pub value: Option<f64>,
    pub limit: f64,
    /// `"min"` when `value ≥ limit` is required, `"max"` for `value ≤ limit`.
    pub bound: String,
    pub detail: String,
}

impl Check {
    pub fn at_most(label: impl Into<String>, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check {
            label: label.into(),
            passed: value <= limit,
            value: Some(value),
            limit,
            bound: "max".into(),
            detail: detail.into(),
        }
    }

    pub fn at_least(label: impl Into<String>, value: Option<f64>, limit: f64, detail: impl Into<String>) -> Self {
        Check {
            label: label.into(),
            passed: value.is_some_and(|v| v >= limit),
            value,
            limit,
            bound: "min".into(),
            detail: detail.into(),
        }
    }
}

/// Order and finest-level checks for one refinement study. A study whose
/// errors all vanish to rounding passes with its order reported as NA.
pub fn convergence_checks(t: &ConvergenceTable, scale: f64, tol: &Tolerance) -> Vec<Check> {
    let floor = EXACT_ZERO * scale.max(1.0);
    if t.errors.iter().all(|&e| e <= floor) {
        return vec![Check::at_most(
            format!("exact {}", t.label),
            t.finest_error(),
            floor,
            "vanishes to rounding on every level; order NA",
        )];
    }
    vec![
        Check::at_least(
            format!("order {}", t.label),
            t.finest_order(),
            tol.min_order,
            "observed order between the two finest levels",
        ),
        Check::at_most(
            format!("linf {}", t.label),
            t.finest_error(),
            tol.rel_linf * scale,
            format!("finest-level L∞ against {} × field scale {scale:.4e}", tol.rel_linf),
        ),
    ]
}

/// Adds the table to the report, flagging non-monotone error sequences.
pub fn push_table(rep: &mut ResidualReport, t: ConvergenceTable) {
    if !t.monotone && t.errors.iter().any(|&e| e > 0.0) {
        rep.warn(format!("{}: residuals are not monotone under refinement", t.label));
    }
    rep.convergence.push(t);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub name: String,
    pub kind: String,
    /// Equation families exercised by the scenario, written as formulas.
    pub equations: Vec<String>,
    pub seed: u64,
    pub tolerance: Tolerance,
    pub parameters: Scenario,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub residuals: ResidualReport,
}

impl Report {
    pub fn new(
        name: &str,
        scenario: &Scenario,
        seed: u64,
        tolerance: Tolerance,
        checks: Vec<Check>,
        residuals: ResidualReport,
    ) -> Self {
        Report {
            schema: SCHEMA,
            tool: "solgeo".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            name: name.into(),
            kind: scenario.kind().into(),
            equations: equations(scenario),
            seed,
            tolerance,
            parameters: scenario.clone(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            residuals,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn residuals_csv(&self) -> Result<String, CliError> {
        let mut w = Table::new(&["label", "linf", "l2"]);
        for e in &self.residuals.entries {
            w.row(vec![e.label.clone(), num(e.linf), num(e.l2)]);
        }
        Ok(w.finish())
    }

    pub fn convergence_csv(&self) -> Result<String, CliError> {
        let mut w = Table::new(&["label", "level", "spacing", "error", "order"]);
        for t in &self.residuals.convergence {
            for (i, (h, e)) in t.spacings.iter().zip(&t.errors).enumerate() {
                let ord = match i.checked_sub(1).map(|j| t.orders[j]) {
                    None => String::new(),
                    Some(Some(p)) => num(p),
                    Some(None) => "NA".into(),
                };
                w.row(vec![t.label.clone(), i.to_string(), num(*h), num(*e), ord]);
            }
        }
        Ok(w.finish())
    }

    pub fn checks_csv(&self) -> Result<String, CliError> {
        let mut w = Table::new(&["label", "passed", "value", "bound", "limit"]);
        for c in &self.checks {
            w.row(vec![
                c.label.clone(),
                c.passed.to_string(),
                c.value.map_or("NA".into(), num),
                c.bound.clone(),
                num(c.limit),
            ]);
        }
        Ok(w.finish())
    }

    /// Writes `<name>.report.json` and the three CSV tables into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let files = [
            ("report.json", self.to_json()?),
            ("residuals.csv", self.residuals_csv()?),
            ("convergence.csv", self.convergence_csv()?),
            ("checks.csv", self.checks_csv()?),
        ];
        let mut out = Vec::new();
        for (suffix, body) in files {
            let p = dir.join(format!("{}.{suffix}", self.name));
            write_atomic(&p, body.as_bytes())?;
            out.push(p);
        }
        Ok(out)
    }

    /// Plain-text summary for the terminal.
    pub fn summary(&self) -> String {
        let mut s = format!("{} ({}), seed {}\n", self.name, self.kind, self.seed);
        for e in &self.equations {
            s.push_str(&format!("  equation: {e}\n"));
        }
        s.push_str(&self.residuals.render());
        for c in &self.checks {
            let v = c.value.map_or("NA".into(), |v| format!("{v:.4e}"));
            let op = if c.bound == "min" { ">=" } else { "<=" };
            s.push_str(&format!(
                "[{}] {}: {v} {op} {:.4e} ({})\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.label,
                c.limit,
                c.detail
            ));
        }
        s
    }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        "NA".into()
    }
}

struct Table(csv::Writer<Vec<u8>>);

impl Table {
    fn new(header: &[&str]) -> Self {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        Table(w)
    }

    fn row(&mut self, r: Vec<String>) {
        self.0.write_record(r).expect("in-memory write");
    }

    fn finish(self) -> String {
        String::from_utf8(self.0.into_inner().expect("in-memory flush")).expect("utf-8 records")
    }
}

/// Writes through a temporary sibling and renames it into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let file_name = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{file_name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}

fn equations(s: &Scenario) -> Vec<String> {
    let v: &[&str] = match s {
        Scenario::FrameIntegration(_) => &[
            "d/ds (e1, e2, e3) = A (e1, e2, e3), A built from (k, sigma, tau)",
            "eta A^T eta = -A, eta = diag(1, 1, beta): so(3) for beta = +1, so(1,2) for beta = -1",
            "r(s) = integral of e1",
        ],
        Scenario::MmlxiiCheck(_) => &[
            "F_mn = d_n A_m - d_m A_n + [A_m, A_n] = 0 for every pair of x, y, z, t",
            "A_m = (d_m g) g^-1",
        ],
        Scenario::SdymCheck(_) => &[
            "F_12 = 0, F_34 = 0, F_14 - F_23 = 0",
            "F_mn = d_n A_m - d_m A_n + [A_m, A_n] over (xi1, xi2, xi3, xi4)",
            "A -> phi^-1 A phi - phi^-1 d phi",
        ],
        Scenario::ReductionCheck(p) => match p.reduction {
            crate::config::ReductionChoice::ZsAkns => &[
                "k = i(p + q), sigma = p - q, tau = -2 lambda",
                "U = [i lambda, q; p, -i lambda]",
            ],
            crate::config::ReductionChoice::Knwki => &[
                "k = i lambda (p + q), sigma = lambda (p - q), tau = -2 lambda",
                "U = [i lambda, lambda q; lambda p, -i lambda]",
            ],
            crate::config::ReductionChoice::ChiralField => &[
                "U = u / (1 - lambda), V = v / (1 + lambda)",
                "U_t - V_x + [U, V] = 0 for all lambda",
                "u_t + [u, v]/2 = 0, v_x - [u, v]/2 = 0",
            ],
            crate::config::ReductionChoice::SpinConstraint => &[
                "k^2 + sigma^2 + tau^2 = n^2",
                "U = (n / 2i) S, S the spin matrix of (k, sigma, tau) / n",
            ],
        },
        Scenario::Embed2p1(_) => &[
            "A1 = -iD, A2 = iD, A3 = (A - iB)/2, A4 = (A + iB)/2",
            "F_12 = 0, F_34 = (i/2) F_xy, F_14 - F_23 = i F_xt",
        ],
        Scenario::LleRun(_) => &[
            "S_t = S x S_xx, |S| = 1",
            "S = (sin(theta) cos(kx - wt), sin(theta) sin(kx - wt), cos(theta)), w = k^2 cos(theta)",
        ],
        Scenario::LaxCheck(_) => &[
            "Psi_m = A_m Psi, path independent iff F_mn = 0",
            "U = mu S, V = -i mu S S_x - 2i mu^2 S",
        ],
        Scenario::ConvergenceSweep(_) => &["D_h f - df/dx = O(h^p) for the selected stencil"],
    };
    v.iter().map(|s| s.to_string()).collect()
}
