//! Run a scenario file through the library and print the JSON report.
//!
//! `cargo run --example run_scenario -- crates/core/scenarios/scalars.scn`

use colombeau::scenario::{parse_scenario, run_scenario, ConfigOverrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/scalars.scn").into());
    let doc = parse_scenario(&std::fs::read_to_string(&path)?)?;
    let flags = ConfigOverrides {
        cap: None,
        grid: None,
        nodes: None,
        seed: None,
    };
    let report = run_scenario(&doc, &flags, false)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    eprintln!("{} of {} checks passed", report.summary.passed, report.summary.total);
    Ok(())
}
