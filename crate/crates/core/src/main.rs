use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use c3_core::cli::{parse_suites, run, RunConfig, Samples};
use c3_core::geometry::GeometryCase;
use c3_core::homotopy::DEFAULT_K;
use c3_core::Error;

/// Seeded verification runs for the C3 geometries over (R,H,H), (R,H,O) and (C,O,O).
#[derive(Parser, Debug)]
#[command(name = "c3check", version)]
struct Args {
    /// Geometry case: hh, ho or oo
    #[arg(long, default_value = "oo")]
    case: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Sample count for every selected suite (default: per-suite presets)
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long = "k-budget", default_value_t = DEFAULT_K)]
    k_budget: usize,
    /// Comma-separated suites: algebra, geometry, covering, homotopy, all
    #[arg(long, default_value = "all")]
    suite: String,
    /// Report path; move logs go to <PATH>.movelogs/
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config(args: &Args) -> Result<RunConfig, Error> {
    let case = GeometryCase::parse(&args.case).ok_or_else(|| Error::Config(format!("unknown case {:?}", args.case)))?;
    let cfg = RunConfig {
        case,
        seed: args.seed,
        samples: args.samples.map(Samples::uniform).unwrap_or_default(),
        tolerance: args.tolerance,
        k_budget: args.k_budget,
        suites: parse_suites(&args.suite, case)?,
        out: args.out.clone(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("c3check: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(report) => {
            if cfg.out.is_none() {
                print!("{}", report.render());
            }
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}: {}", c.name, c.counterexample.as_deref().unwrap_or(""));
            }
            ExitCode::from(c3_core::cli::exit_code(&report) as u8)
        }
        Err(e) => {
            eprintln!("c3check: {e}");
            ExitCode::from(2)
        }
    }
}
