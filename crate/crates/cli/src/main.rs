mod args;
mod commands;
mod output;

use std::fs;
use std::process::ExitCode;

use abcd_cnoidal::Error;
use anyhow::{Context, Result};
use clap::{CommandFactory, Parser};
use serde_json::Value;

use args::{Cli, Command, RunConfig};

fn load_config(cli: &Cli) -> Result<Option<RunConfig>> {
    let Some(path) = &cli.config else { return Ok(None) };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let body = value.get("config").cloned().unwrap_or(value);
    let mut cfg: RunConfig = serde_json::from_value(body).context("reading the run config")?;
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(name) = &cli.name {
        cfg.stem = name.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.rng_seed = seed;
    }
    Ok(Some(cfg))
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match (load_config(&cli)?, &cli.command) {
        (Some(_), Some(_)) => return Err(Error::Usage("--config replaces the subcommand; give one or the other".into()).into()),
        (Some(cfg), None) => cfg,
        (None, Some(cmd)) => RunConfig::new(cmd.clone(), &cli),
        (None, None) => {
            Cli::command().print_help()?;
            return Err(Error::Usage("no command given".into()).into());
        }
    };
    match &cfg.command {
        Command::Family(a) => commands::family(&cfg, a),
        Command::Verify(a) => commands::verify(&cfg, a),
        Command::Classify(a) => commands::classify(&cfg, a),
        Command::Solve(a) => commands::solve(&cfg, a),
        Command::Reduce(a) => commands::reduce(&cfg, a),
        Command::Limit(a) => commands::limit(&cfg, a),
        Command::Nonexistence(a) => commands::nonexistence(&cfg, a),
    }
}

/// 2 for invalid input, 3 for a solve that did not converge, 1 otherwise.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Domain(_) | Error::Usage(_) | Error::Constraint(_) | Error::Parse(_) | Error::Underdetermined { .. }) => 2,
        Some(Error::Divergence { .. } | Error::SingularJacobian { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
