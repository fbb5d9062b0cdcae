//! Command-line front end: configuration parsing, batch orchestration,
//! and report emission.
//!
//! Exit codes: 0 when the run completes with no consistency violations,
//! 1 when the report contains violations, 2 on configuration or I/O
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chaoslab::report::{self, Report, ReportFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "chaoslab",
    version,
    about = "Chaos-property profiling for interval maps, subshifts, and cellular automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze every system in a JSON run configuration.
    Analyze {
        /// Path to the run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Override the random seed everywhere in the batch.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the iteration horizon everywhere in the batch.
        #[arg(long)]
        horizon: Option<usize>,
        /// Override the pair/point sample count everywhere in the batch.
        #[arg(long)]
        pairs: Option<usize>,
        /// Where to write the report.
        #[arg(long)]
        out: PathBuf,
        /// Report encoding: json or csv-series.
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Run the bundled demonstration batch.
    Zoo {
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Applies command-line overrides to the shared budget and every
/// per-system override, so a flag affects the whole batch uniformly.
fn apply_overrides(
    config: &mut RunConfig,
    seed: Option<u64>,
    horizon: Option<usize>,
    pairs: Option<usize>,
) {
    let mut budgets: Vec<_> = vec![&mut config.budget];
    budgets.extend(config.entries.iter_mut().filter_map(|e| e.budget.as_mut()));
    for b in budgets {
        if let Some(s) = seed {
            b.seed = s;
        }
        if let Some(h) = horizon {
            b.horizon = h;
        }
        if let Some(p) = pairs {
            b.samples = p;
        }
    }
}

fn exit_for(report: &Report) -> ExitCode {
    if report.violation_total == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_analyze(
    config_path: &PathBuf,
    seed: Option<u64>,
    horizon: Option<usize>,
    pairs: Option<usize>,
    out: &PathBuf,
    format: &str,
) -> Result<ExitCode, String> {
    let format = ReportFormat::parse(format).map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| format!("cannot read {}: {e}", config_path.display()))?;
    let mut config = report::parse_config(&text).map_err(|e| e.to_string())?;
    apply_overrides(&mut config, seed, horizon, pairs);
    config.budget.validate().map_err(|e| e.to_string())?;
    for entry in &config.entries {
        if let Some(b) = &entry.budget {
            b.validate().map_err(|e| format!("system {:?}: {e}", entry.label))?;
        }
    }
    let result = report::run(&config);
    let rendered = report::emit(&result, format).map_err(|e| e.to_string())?;
    std::fs::write(out, rendered).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
    Ok(exit_for(&result))
}

fn run_zoo(out: Option<&PathBuf>) -> Result<ExitCode, String> {
    let config = report::zoo_config();
    let result = report::run(&config);
    let rendered = report::emit_json(&result).map_err(|e| e.to_string())?;
    match out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(exit_for(&result))
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("CHAOSLAB_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                // A second build_global in one process is an error; the
                // pool is configured once before any parallel work.
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("chaoslab: cannot set thread count: {e}");
                    return ExitCode::from(2);
                }
            }
            _ => {
                eprintln!("chaoslab: CHAOSLAB_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze { config, seed, horizon, pairs, out, format } => {
            run_analyze(config, *seed, *horizon, *pairs, out, format)
        }
        Command::Zoo { out } => run_zoo(out.as_ref()),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("chaoslab: {message}");
            ExitCode::from(2)
        }
    }
}
