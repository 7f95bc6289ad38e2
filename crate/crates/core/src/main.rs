use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use steiner_lab::scenario::{run_file, OutputFormat, Step};

#[derive(Parser)]
#[command(name = "steiner-lab", version, about = "Steiner symmetrization and steady Euler flow diagnostics")]
struct Cli {
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the scenario's `output.directory`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized perturbations; overrides the scenario's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symmetrize the case grid for every time and direction.
    Symmetrize,
    /// Rearrangement axioms, Pólya–Szegő, continuity, truncation, J test.
    Verify,
    /// Derived fields, residuals, stagnation set, symmetry, far field.
    Euler,
    /// Level curves and reconstruction of f.
    ReconstructF,
    /// One circle scan.
    Scan {
        #[arg(long, value_enum)]
        kind: ScanKind,
    },
    /// Every step listed in the scenario (or all supported steps).
    Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanKind {
    Oscillation,
    Flux,
    Pohozaev,
    Annular,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("STEINER_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    let Some(config) = cli.config else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(1);
    };
    let steps: Option<Vec<Step>> = match cli.command {
        Command::Symmetrize => Some(vec![Step::Symmetrize]),
        Command::Verify => Some(vec![Step::Verify]),
        Command::Euler => Some(vec![Step::Euler, Step::Asymptotics]),
        Command::ReconstructF => Some(vec![Step::ReconstructF]),
        Command::Scan { kind } => Some(vec![match kind {
            ScanKind::Oscillation => Step::Oscillation,
            ScanKind::Flux => Step::Flux,
            ScanKind::Pohozaev => Step::Pohozaev,
            ScanKind::Annular => Step::Annular,
        }]),
        Command::Report => None,
    };
    let format = cli.format.map(|f| match f {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
        Format::Both => OutputFormat::Both,
    });
    match run_file(&config, cli.out.as_deref(), cli.seed, format, steps.as_deref()) {
        Ok((run, code)) => {
            let failures: Vec<_> = run.report.failures().collect();
            for f in &failures {
                eprintln!("FAIL {} (lhs {}, rhs {}, tol {})", f.name, f.lhs, f.rhs, f.tolerance);
            }
            println!(
                "{}: {} records, {} passing checks, {} unexpected results",
                run.report.scenario,
                run.report.records.len(),
                run.report.passing_checks(),
                failures.len()
            );
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
