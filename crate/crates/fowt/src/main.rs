use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fowt::commands::{self, Outcome};
use fowt::output::prepare_dir;
use fowt::{params, Result, RunConfig};

/// Pitch-control analysis for floating wind turbines.
#[derive(Debug, Parser)]
#[command(name = "fowt", version)]
struct Cli {
    /// Run configuration (INI).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, short, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides `[run] seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for `campaign` (default: all cores).
    #[arg(long, short, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesise gains and export them as a `[gains]` section.
    Tune,
    /// NMPZ conditions, roots, modes and stability verdict.
    Analyze,
    /// Time-domain simulation to `timeseries.csv`.
    Simulate,
    /// Closed-loop and reduced Bode data, one CSV per channel pair.
    Bode,
    /// Rainflow, DEL and damage of a series CSV.
    Fatigue {
        /// Series written by `simulate`.
        #[arg(long)]
        series: PathBuf,
    },
    /// Wind speed x strategy grid to `campaign.csv`.
    Campaign,
    /// List the built-in parameter sets, or print one.
    Params { name: Option<String> },
}

fn execute(cli: &Cli) -> Result<Outcome> {
    if let Command::Params { name } = &cli.command {
        let report = match name {
            None => params::builtin_names().map(|n| format!("{n}\n")).collect(),
            Some(n) => params::builtin(n)
                .ok_or_else(|| fowt::Error::UnresolvedSet(n.clone()))?
                .to_string(),
        };
        return Ok(Outcome {
            report,
            ..Outcome::default()
        });
    }
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| fowt::Error::Config("--config is required".into()))?;
    let cfg = RunConfig::load(path, cli.seed)?;
    let out = prepare_dir(&cli.out)?;
    let mut outcome = match &cli.command {
        Command::Tune => commands::tune(&cfg, &out),
        Command::Analyze => commands::analyze(&cfg, &out),
        Command::Simulate => commands::simulate(&cfg, &out),
        Command::Bode => commands::bode(&cfg, &out),
        Command::Fatigue { series } => commands::fatigue(&cfg, series, &out),
        Command::Campaign => commands::campaign(&cfg, &out, cli.jobs),
        Command::Params { .. } => unreachable!("handled above"),
    }?;
    outcome.warnings.splice(0..0, cfg.warnings);
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", outcome.report);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
