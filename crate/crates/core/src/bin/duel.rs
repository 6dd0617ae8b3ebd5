use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use duel::harness::{builtin_scenarios, emit_plot_script, exit_code, plot_script, run_scenario};
use duel::wagerset::scales_into;
use duel::{Error, Result, WagerSet};

/// Restricted-wager martingales: scenario runner and set queries.
#[derive(Parser)]
#[command(name = "duel", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or `builtin:<name>`) and write its artifacts.
    Run {
        scenario: String,
        /// Output directory; defaults to the scenario's `outputDir` or `out/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scenarios.
    ListBuiltins {
        /// Print the full catalogue as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Decide whether A scales into the closure of B; each argument is inline JSON or a file.
    CheckScaling {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Write a gnuplot script for a trajectory CSV.
    Plot {
        csv: PathBuf,
        /// Print the script instead of writing `<csv>.gp`.
        #[arg(long)]
        stdout: bool,
    },
}

fn wager_set(arg: &str) -> Result<WagerSet> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)?
    };
    let set: WagerSet = serde_json::from_str(&text)?;
    set.validate()?;
    Ok(set)
}

/// Prints to stdout, treating a closed pipe (e.g. `| head`) as success.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { scenario, out } => {
            let (report, artifacts) = run_scenario(&scenario, out.as_deref())?;
            eprintln!("wrote {}", artifacts.dir.display());
            emit(&serde_json::to_string_pretty(&report.summary)?)?;
        }
        Command::ListBuiltins { json } => {
            let all = builtin_scenarios();
            if json {
                emit(&serde_json::to_string_pretty(&all)?)?;
            } else {
                let lines: Vec<String> = all
                    .iter()
                    .map(|b| format!("{:<30} {:<18} {}", b.name, b.scenario.mode.label(), b.description))
                    .collect();
                emit(&lines.join("\n"))?;
            }
        }
        Command::CheckScaling { a, b } => {
            let answer = scales_into(&wager_set(&a)?, &wager_set(&b)?)?;
            emit(&serde_json::to_string(&answer)?)?;
        }
        Command::Plot { csv, stdout } => {
            if stdout {
                let text = std::fs::read_to_string(&csv)?;
                let name = csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                emit(plot_script(&text, &name)?.trim_end())?;
            } else {
                emit(&emit_plot_script(&csv)?.display().to_string())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = if matches!(e, Error::Scenario(_) | Error::Json(_) | Error::Io(_)) {
                "input error"
            } else if e.is_invariant_trap() {
                "invariant trap"
            } else {
                "error"
            };
            eprintln!("duel: {kind}: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
