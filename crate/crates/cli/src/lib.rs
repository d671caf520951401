//! Scenario runner behind the `solgeo` binary: JSON configs in, residual
//! reports and field exports out.

pub mod config;
pub mod report;
pub mod scenarios;

use std::path::{Path, PathBuf};

use solgeo_core::fields::io;

pub use config::{Config, Scenario, Tolerance};
pub use report::{Check, Report};
pub use scenarios::{Artifact, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] solgeo_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Process exit status.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const TOLERANCE: u8 = 1;
    pub const CONFIG: u8 = 2;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

/// Command-line overrides applied on top of a config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    /// Replaces `tolerance.rel_linf`.
    pub tol: Option<f64>,
    /// Replaces the grid levels by this many doublings of the coarsest one.
    pub levels: Option<usize>,
    pub out: Option<PathBuf>,
}

pub struct RunResult {
    pub report: Report,
    pub files: Vec<PathBuf>,
}

impl RunResult {
    pub fn exit_code(&self) -> u8 {
        if self.report.passed {
            exit::PASS
        } else {
            exit::TOLERANCE
        }
    }
}

/// Applies overrides and revalidates.
pub fn prepare(mut cfg: Config, ov: &Overrides) -> Result<Config, CliError> {
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if let Some(t) = ov.tol {
        cfg.tolerance.rel_linf = t;
    }
    if let Some(n) = ov.levels {
        let kind = cfg.scenario.kind();
        let grid = cfg
            .scenario
            .grid_mut()
            .ok_or_else(|| CliError::Config(format!("{kind} has no grid levels to refine")))?;
        *grid = grid.refined(n)?;
    }
    if let Some(o) = &ov.out {
        cfg.output = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn output_dir(cfg: &Config) -> PathBuf {
    cfg.output.clone().unwrap_or_else(|| PathBuf::from("solgeo-out"))
}

/// Runs the scenario and builds its report without touching the disk.
pub fn evaluate(cfg: &Config, keep_fields: bool) -> Result<(Report, Vec<(String, Artifact)>), CliError> {
    let out = scenarios::execute(&cfg.scenario, cfg.seed, &cfg.tolerance, keep_fields)?;
    let report = Report::new(cfg.name(), &cfg.scenario, cfg.seed, cfg.tolerance, out.checks, out.residuals);
    Ok((report, out.artifacts))
}

/// `solgeo run` and `solgeo sweep`: evaluates and writes the report files.
pub fn run(cfg: &Config) -> Result<RunResult, CliError> {
    let (report, _) = evaluate(cfg, false)?;
    let files = report.write(&output_dir(cfg))?;
    Ok(RunResult { report, files })
}

/// `solgeo export`: evaluates, writes the report files and the finest-level
/// fields in the requested format.
pub fn export(cfg: &Config, format: ExportFormat) -> Result<RunResult, CliError> {
    let (report, artifacts) = evaluate(cfg, true)?;
    let dir = output_dir(cfg);
    let mut files = report.write(&dir)?;
    for (name, a) in &artifacts {
        let ext = match format {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        };
        let path = dir.join(format!("{}.{name}.{ext}", cfg.name()));
        write_artifact(&path, a, format)?;
        files.push(path);
    }
    Ok(RunResult { report, files })
}

fn write_artifact(path: &Path, a: &Artifact, format: ExportFormat) -> Result<(), CliError> {
    let mut buf = Vec::new();
    match (a, format) {
        (Artifact::Matrix(f), ExportFormat::Csv) => io::write_csv(f, &mut buf)?,
        (Artifact::Matrix(f), ExportFormat::Json) => io::write_json(f, &mut buf)?,
        (Artifact::Vector(f), ExportFormat::Csv) => io::write_csv(f, &mut buf)?,
        (Artifact::Vector(f), ExportFormat::Json) => io::write_json(f, &mut buf)?,
        (Artifact::Polyline(p), ExportFormat::Csv) => solgeo_core::frames::write_polyline_csv(p, &mut buf)?,
        (Artifact::Polyline(p), ExportFormat::Json) => {
            serde_json::to_writer(&mut buf, p).map_err(|e| CliError::Io(e.to_string()))?
        }
    }
    report::write_atomic(path, &buf)
}
