//! Batch front-end: JSON experiment configs in, CSV/JSON reports out.

mod commands;
mod config;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{Outcome, EXIT_FAILED, EXIT_USAGE};
use config::Config;

#[derive(Parser)]
#[command(name = "setvalued", version, about = "Hausdorff geodesics, rotund sets and set-valued iterations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; defaults to `global.output_path`, then stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `global.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppresses progress lines on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    Hausdorff,
    Project,
    GeodesicCheck,
    Porosity,
    Rotundify,
    Perturb,
    Trajectory,
    AnSample,
    Genericity,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Hausdorff => "hausdorff",
            Command::Project => "project",
            Command::GeodesicCheck => "geodesic-check",
            Command::Porosity => "porosity",
            Command::Rotundify => "rotundify",
            Command::Perturb => "perturb",
            Command::Trajectory => "trajectory",
            Command::AnSample => "an-sample",
            Command::Genericity => "genericity",
        }
    }
}

fn load(cli: &Cli) -> Result<Config> {
    let path = cli.config.as_ref().context("--config is required")?;
    let mut cfg = Config::load(path)?;
    if cfg.command != cli.command.name() {
        bail!("config is for `{}`, not `{}`", cfg.command, cli.command.name());
    }
    if let Some(seed) = cli.seed {
        cfg.global.seed = seed;
    }
    Ok(cfg)
}

/// Core failures of a run map to a structured report with exit 4; anything
/// else is a usage or schema error.
fn failure_report(err: &anyhow::Error) -> Option<Outcome> {
    let core = err.chain().find_map(|e| e.downcast_ref::<setvalued::Error>())?;
    let body = match core {
        setvalued::Error::StageFailure { stage, reason } => {
            json!({ "status": "stage_failure", "stage": stage, "reason": reason })
        }
        setvalued::Error::NonConvergence { .. } | setvalued::Error::Degenerate(_) => {
            json!({ "status": "failure", "reason": core.to_string() })
        }
        _ => return None,
    };
    let mut text = serde_json::to_string_pretty(&body).ok()?;
    text.push('\n');
    Some(Outcome {
        text,
        code: EXIT_FAILED,
    })
}

fn write(outcome: &Outcome, target: Option<&PathBuf>) -> Result<()> {
    match target {
        Some(path) => fs::write(path, &outcome.text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{}", outcome.text);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let target = cli
        .out
        .clone()
        .or_else(|| cfg.global.output_path.as_ref().map(|p| cfg.base_dir.join(p)));
    let quiet = cli.quiet;
    let mut progress = |line: &str| {
        if !quiet {
            eprintln!("{line}");
        }
    };
    let outcome = match commands::run(&cfg, &mut progress) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            match failure_report(&e) {
                Some(o) => o,
                None => return ExitCode::from(EXIT_USAGE as u8),
            }
        }
    };
    if let Err(e) = write(&outcome, target.as_ref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    ExitCode::from(outcome.code as u8)
}
