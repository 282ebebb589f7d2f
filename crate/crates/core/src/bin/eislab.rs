use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eislab::models::{describe, PRESET_NAMES};
use eislab::report::{emit_report, emit_timeseries, render_report, run, ReportFormat};
use eislab::scenario::{load_scenario, LoadOptions};
use eislab::selftest::run_selftest;
use eislab::{Error, ToleranceConfig};

const SEED_ENV: &str = "EISLAB_SEED";
const TOLERANCES_ENV: &str = "EISLAB_TOLERANCES";

#[derive(Parser)]
#[command(name = "eislab", version, about = "Decoherence semigroup laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and emit its report.
    Run {
        scenario: PathBuf,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Time-series CSV path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// json or text.
        #[arg(long, default_value = "json")]
        format: String,
        /// Overrides the scenario seed and EISLAB_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Base tolerance file; overrides EISLAB_TOLERANCES.
        #[arg(long)]
        tolerances: Option<PathBuf>,
    },
    /// Built-in models.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
    /// Run the invariant suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ModelsAction {
    List,
    Describe { name: String },
}

fn env_seed() -> Result<Option<u64>, Error> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Error::Usage(format!("{SEED_ENV} must be an unsigned integer, got '{v}'"))
        }),
        Err(_) => Ok(None),
    }
}

fn execute(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            csv,
            format,
            seed,
            tolerances,
        } => {
            let format: ReportFormat = format.parse()?;
            let tol_path =
                tolerances.or_else(|| std::env::var_os(TOLERANCES_ENV).map(PathBuf::from));
            let opts = LoadOptions {
                seed_override: seed,
                default_seed: env_seed()?,
                base_tolerances: tol_path
                    .map(|p| ToleranceConfig::from_file(&p))
                    .transpose()?,
            };
            let sc = load_scenario(&scenario, &opts)?;
            let report = run(&sc);
            match out {
                Some(path) => emit_report(&report, &path, format)?,
                None => print!("{}", render_report(&report, format)),
            }
            if let Some(path) = csv {
                emit_timeseries(&report, &path)?;
            }
            for failed in report.analyses.iter().filter(|a| !a.ok) {
                eprintln!(
                    "analysis {} failed: {}",
                    failed.analysis.name(),
                    failed.error.as_deref().unwrap_or("")
                );
            }
            Ok(report.exit_code())
        }
        Command::Models {
            action: ModelsAction::List,
        } => {
            for name in PRESET_NAMES {
                let summary = describe(name).and_then(|d| d.lines().next()).unwrap_or("");
                println!("{summary}");
            }
            Ok(0)
        }
        Command::Models {
            action: ModelsAction::Describe { name },
        } => {
            let text = describe(&name).ok_or_else(|| {
                Error::Usage(format!(
                    "unknown model '{name}' (known: {})",
                    PRESET_NAMES.join(", ")
                ))
            })?;
            println!("{text}");
            Ok(0)
        }
        Command::Selftest { seed } => {
            let checks = run_selftest(seed);
            for c in &checks {
                println!(
                    "[{}] {}: {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.suite,
                    c.name,
                    c.detail
                );
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {failed} failed", checks.len());
            Ok(i32::from(failed > 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
