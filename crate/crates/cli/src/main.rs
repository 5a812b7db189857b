use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kinkbound::detmass::{self, AngularMeasure};
use kinkbound::dynamics::read_event_log;
use kinkbound::exec::Execution;
use kinkbound::harness::{self, ExperimentConfig, SweepSpec};
use kinkbound::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "kinkbound", version, about = "Hard-sphere collision statistics and tensor audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write events.jsonl, ledger.csv, report.json, audit.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a parameter sweep and write ratios.csv plus per-N reports.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run the grid on the calling thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Determinantal mass and polygon area of a planar measure.
    Detmass {
        #[arg(long)]
        measure: PathBuf,
    },
    /// Rebuild the tensor of an event log and audit its balances.
    VerifyTensor {
        #[arg(long)]
        events: PathBuf,
        /// Time window as `a,b`.
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
        #[arg(long, default_value_t = 10)]
        slices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare a run with its time-rescaled copy.
    ScaleCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        mu: f64,
    },
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected a,b")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    Ok((a, b))
}

enum Failure {
    Sim(Error),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Sim(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn print(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json values serialize"));
}

fn open(path: &PathBuf) -> anyhow::Result<BufReader<File>> {
    use anyhow::Context;
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg: ExperimentConfig = serde_json::from_reader(open(&config)?).map_err(Error::from)?;
            let outcome = harness::run_experiment(&cfg, Some(&out))?;
            print(&json!({
                "events": outcome.log.events.len(),
                "termination": outcome.log.termination,
                "ratio1": outcome.report.ratio1,
                "ratio2": outcome.report.ratio2,
                "audit_pass": outcome.audit.passes(),
                "out": out,
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { spec, out, sequential } => {
            let spec: SweepSpec = serde_json::from_reader(open(&spec)?).map_err(Error::from)?;
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let (rows, summary) = harness::sweep(&spec, exec, Some(&out))?;
            print(&json!({ "runs": rows.len(), "summary": summary, "out": out }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Detmass { measure } => {
            let mu: AngularMeasure = serde_json::from_reader(open(&measure)?).map_err(Error::from)?;
            let mu = AngularMeasure::new(mu.atoms)?;
            let summary = detmass::summarize(&mu)?;
            print(&serde_json::to_value(&summary).map_err(Error::from)?);
            Ok(if summary.balanced { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::VerifyTensor {
            events,
            window,
            slices,
            seed,
        } => {
            let log = read_event_log(open(&events)?)?;
            let audit = harness::audit_log(&log, window, slices, seed)?;
            let pass = audit.passes();
            let mut value = serde_json::to_value(&audit).map_err(Error::from)?;
            value["pass"] = json!(pass);
            print(&value);
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::ScaleCheck { config, mu } => {
            let cfg: ExperimentConfig = serde_json::from_reader(open(&config)?).map_err(Error::from)?;
            let check = harness::scale_check(&cfg.scenario()?, mu, cfg.epsilon)?;
            print(&serde_json::to_value(&check).map_err(Error::from)?);
            Ok(if check.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Sim(e)) => {
            print(&json!({ "error": e.kind(), "message": e.to_string() }));
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Other(e)) => {
            print(&json!({ "error": "io", "message": format!("{e:#}") }));
            ExitCode::from(1)
        }
    }
}
