use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use solgeo_cli::{exit, CliError, Config, ExportFormat, Overrides, RunResult};

#[derive(Parser)]
#[command(name = "solgeo", version, about = "Residual oracles for zero-curvature and self-duality equations")]
struct Cli {
    /// Seed for the manufactured fields; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Finest-level L∞ bound relative to the field scale; overrides the config.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario and write its report.
    Run { config: PathBuf },
    /// Run a scenario on `levels` grids doubling from its coarsest level.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        levels: usize,
    },
    /// Run a scenario and export its finest-level fields.
    Export {
        config: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.quiet { "error" } else { "warn" }))
        .init();
    match dispatch(&cli) {
        Ok(res) => {
            if !cli.quiet {
                print!("{}", res.report.summary());
                for f in &res.files {
                    println!("wrote {}", f.display());
                }
            }
            for c in res.report.failures() {
                eprintln!("tolerance failure: {} ({})", c.label, c.detail);
            }
            ExitCode::from(res.exit_code())
        }
        Err(e) => {
            eprintln!("solgeo: {e}");
            ExitCode::from(exit::CONFIG)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<RunResult, CliError> {
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Config(format!("--tol must be positive, got {t}")));
        }
    }
    let mut ov = Overrides {
        seed: cli.seed,
        tol: cli.tol,
        levels: None,
        out: cli.out.clone(),
    };
    let (path, format) = match &cli.cmd {
        Cmd::Run { config } => (config, None),
        Cmd::Sweep { config, levels } => {
            ov.levels = Some(*levels);
            (config, None)
        }
        Cmd::Export { config, format } => (config, Some(*format)),
    };
    let cfg = solgeo_cli::prepare(Config::from_path(path)?, &ov)?;
    match format {
        None => solgeo_cli::run(&cfg),
        Some(Format::Csv) => solgeo_cli::export(&cfg, ExportFormat::Csv),
        Some(Format::Json) => solgeo_cli::export(&cfg, ExportFormat::Json),
    }
}
