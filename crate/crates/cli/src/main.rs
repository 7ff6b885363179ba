//! `netform`: run, analyze and sweep social network formation simulations.

mod analyze;
mod error;
mod oracle;
mod report;
mod simulate;
mod sweep;

use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::analyze::CheckName;

#[derive(Parser)]
#[command(name = "netform", version, about = "Microfounded social network formation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ensemble and write agents, edges, meetings, trajectories and a manifest.
    Simulate {
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's replication count.
        #[arg(long)]
        replications: Option<u32>,
        #[arg(long, env = "NETFORM_OUT", default_value = "netform-out")]
        out: PathBuf,
    },
    /// Print closed-form predictions for a config.
    Oracle {
        config: PathBuf,
        /// Print only the JSON document.
        #[arg(long)]
        json: bool,
    },
    /// Compare the logs of a run against the closed forms.
    Analyze {
        results: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        check: Vec<CheckName>,
        /// Second run for paired checks (fosd, crossover across γ).
        #[arg(long)]
        compare: Option<PathBuf>,
        /// Report destination; defaults to `report.csv` in the results directory.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-run a config for each value of one parameter with a shared seed.
    Sweep {
        config: PathBuf,
        /// `key=v1,v2,...`
        #[arg(long)]
        vary: String,
        #[arg(long, env = "NETFORM_OUT", default_value = "netform-out")]
        out: PathBuf,
    },
}

/// Writes to stdout; a closed pipe (`netform oracle cfg | head`) is not an error.
pub(crate) fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() != ErrorKind::BrokenPipe {
            eprintln!("netform: stdout: {e}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { config, seed, replications, out } => {
            simulate::run(&config, seed, replications, &out)
        }
        Command::Oracle { config, json } => oracle::run(&config, json),
        Command::Analyze { results, check, compare, report } => {
            analyze::run(&results, &check, compare.as_deref(), report.as_deref())
        }
        Command::Sweep { config, vary, out } => sweep::run(&config, &vary, &out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("netform: {e}");
            e.exit_code()
        }
    }
}
