use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use enbrauer::forms::FormKind;
use enbrauer::scenario::{run_all, Check, RunReport, ScenarioConfig, Suite};

/// Checks commutant dualities on tensor powers of the enhanced natural module.
#[derive(Parser, Debug)]
#[command(name = "enbrauer", version)]
struct Args {
    /// orthogonal | symplectic; with --n and --r, runs a single scenario.
    #[arg(long, requires_all = ["n", "r"])]
    form: Option<FormKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Comma-separated: dims,brauer,mulformula,restricted,levi,parabolic,filtration,annihilation,sanity-gl
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    checks: Vec<Check>,
    /// default | extended. Ignored when --form is given.
    #[arg(long, default_value = "default")]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow commutants on the enhanced space at r >= 3.
    #[arg(long)]
    stress: bool,
    /// Per-level dimension table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Record wall-clock time per check (breaks byte-identical reports).
    #[arg(long)]
    timings: bool,
}

fn configs(args: &Args) -> Vec<ScenarioConfig> {
    let mut out = match (args.form, args.n, args.r) {
        (Some(form), Some(n), Some(r)) => {
            vec![ScenarioConfig::new(
                form,
                n,
                r,
                Check::ALL.to_vec(),
                args.seed,
            )]
        }
        _ => args.suite.scenarios(args.seed),
    };
    for c in &mut out {
        if !args.checks.is_empty() {
            c.checks = args.checks.clone();
            c.checks.sort();
            c.checks.dedup();
        }
        c.stress = args.stress;
        c.timings = args.timings;
    }
    out
}

fn write_csv(path: &PathBuf, report: &RunReport) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_path(path)?;
    for row in report.dimension_rows() {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let configs = configs(&args);
    if let Some(err) = configs.iter().find_map(|c| c.validate().err()) {
        eprintln!("error: {err}");
        return ExitCode::from(2);
    }
    let report = match run_all(&configs, args.seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let json = report.to_json();
    let written = match &args.out {
        Some(path) => std::fs::write(path, &json).map_err(|e| e.to_string()),
        None => {
            print!("{json}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(2);
    }
    if let Some(path) = &args.csv {
        if let Err(e) = write_csv(path, &report) {
            eprintln!("error: writing csv: {e}");
            return ExitCode::from(2);
        }
    }
    for rep in &report.reports {
        let dims: Vec<String> = rep
            .sides
            .iter()
            .map(|s| format!("{}={}", s.name, s.dim))
            .collect();
        eprintln!(
            "{:<18} {:<12} {:?}  {}",
            rep.check,
            rep.scenario,
            rep.status,
            dims.join(", ")
        );
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
