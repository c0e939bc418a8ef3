use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use trapwalk::output::{self, parse_experiment};
use trapwalk::parallel::{default_workers, WORKERS_ENV};
use trapwalk::presets::preset;
use trapwalk::runner::{self, RunReport};
use trapwalk::spec::AnalysisOptions;
use trapwalk::ExperimentSpec;
use trapwalk_core::analysis::{classical_references, predict};
use trapwalk_core::ensemble::InitKind;

/// Survival of quantum and classical walkers on a ring with random traps.
#[derive(Debug, Parser)]
#[command(name = "trapwalk", version)]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment spec, or re-run the cell described by a metadata record.
    Run {
        spec: PathBuf,
        /// Output directory (overrides the spec's).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a figure preset at desk scale.
    Preset {
        name: String,
        /// Fraction of the paper's ensemble size to use.
        #[arg(long)]
        scale_m: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the expanded spec as JSON and exit.
        #[arg(long)]
        dry_run: bool,
    },
    /// Fit a survival curve CSV and print the report as JSON.
    Fit {
        curve: PathBuf,
        #[arg(long, default_value_t = AnalysisOptions::default().t_min)]
        t_min: usize,
        #[arg(long, default_value_t = AnalysisOptions::default().crossover_margin)]
        margin: f64,
        #[arg(long)]
        weighted: bool,
    },
    /// Print the analytic exponents and crossover time for a trap density.
    Predict {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value = "up")]
        init: InitKind,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    let workers = cli
        .workers
        .filter(|&n| n > 0)
        .unwrap_or_else(default_workers);
    match cli.command {
        Command::Run { spec, out } => {
            let text = std::fs::read_to_string(&spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let spec = parse_experiment(&text).with_context(|| format!("in {}", spec.display()))?;
            execute(&spec, workers, out)
        }
        Command::Preset {
            name,
            scale_m,
            out,
            dry_run,
        } => {
            let spec = preset(&name, scale_m)?;
            if dry_run {
                emit(&serde_json::to_string_pretty(&spec)?)?;
                return Ok(ExitCode::SUCCESS);
            }
            execute(&spec, workers, out)
        }
        Command::Fit {
            curve,
            t_min,
            margin,
            weighted,
        } => {
            let c = output::read_curve_file(&curve)?;
            let options = AnalysisOptions {
                t_min,
                crossover_margin: margin,
                weighted,
            };
            let report = runner::analyze(&c.mean, &c.stderr, None, &options, None);
            emit(&serde_json::to_string_pretty(&report)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Predict { rho, init } => {
            let report = serde_json::json!({
                "prediction": predict(rho, init)?,
                "references": classical_references(),
            });
            emit(&serde_json::to_string_pretty(&report)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn execute(
    spec: &ExperimentSpec,
    workers: usize,
    out: Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    let report = runner::run(spec, workers, out.as_deref())?;
    summarize(&report);
    if report.failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}

fn summarize(report: &RunReport) {
    for out in &report.outputs {
        let a = &out.record.analysis;
        match a.crossover {
            Some(f) => eprintln!(
                "{}: beta1 {:.4} beta2 {:.4} t_c {}{}",
                out.cell.name(),
                f.beta1,
                f.beta2,
                f.t_c,
                if f.crossover { "" } else { " (no crossover)" }
            ),
            None => eprintln!("{}: no fit ({})", out.cell.name(), a.notes.join("; ")),
        }
    }
    let paths: Vec<String> = report
        .written
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    if !paths.is_empty() {
        let _ = emit(&paths.join("\n"));
    }
    for failure in &report.failures {
        eprintln!("FAILED {}: {:#}", failure.cell.name(), failure.error);
    }
}

/// Prints a line to stdout; a closed pipe is not an error.
fn emit(text: &str) -> anyhow::Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}
