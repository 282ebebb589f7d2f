//! Runs a scenario file through every analysis and prints the text report.
//!
//! `cargo run --example scenario_report -- examples/scenarios/driven_decay.toml`

use std::path::PathBuf;

use eislab::report::{render_report, run, ReportFormat};
use eislab::scenario::{load_scenario, LoadOptions};

fn main() -> eislab::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR"))
                .join("examples/scenarios/amplitude_damping.toml")
        });
    let scenario = load_scenario(&path, &LoadOptions::default())?;
    let report = run(&scenario);
    print!("{}", render_report(&report, ReportFormat::Text));
    std::process::exit(report.exit_code());
}
