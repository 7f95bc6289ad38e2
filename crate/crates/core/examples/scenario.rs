//! Run a scenario file through the library API and write its report.
//!
//! `cargo run --release --example scenario -- configs/gaussian_full.json out/gaussian`

use std::path::PathBuf;

use steiner_lab::scenario::{run_scenario, OutputFormat, Scenario};

fn main() -> steiner_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let config: PathBuf = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/twobump_negative.json").into()).into();
    let out: PathBuf = args.next().unwrap_or_else(|| "out/scenario".into()).into();
    let sc = Scenario::load(&config)?;
    let run = run_scenario(&sc, None)?;
    run.write(&out, OutputFormat::Both)?;
    for r in &run.report.records {
        let mark = match (r.passed, r.expect_fail) {
            (true, false) => "pass",
            (false, true) => "fail (expected)",
            (false, false) => "FAIL",
            (true, true) => "PASS (expected failure)",
        };
        println!("{:<48} {mark}", r.name);
    }
    println!("exit code {} ; report in {}", run.exit_code(), out.display());
    Ok(())
}
