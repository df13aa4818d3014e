//! `weak-tt`: command-line driver for the weak traitor-tracing experiments.
//!
//! Every command writes a JSON report (with `--out`, or to stdout with
//! `--json`). Exit codes: 0 pass or complete, 1 a check failed, 2 usage
//! error, 3 capacity or sampling limit.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

mod args;
mod commands;
mod error;
mod report;

use commands::attack::AttackArgs;
use commands::bench::BenchArgs;
use commands::game::GameCommand;
use commands::keys::{DecryptArgs, EncryptArgs, SetupArgs};
use commands::verify::VerifyCommand;
use error::CliError;
use report::Outcome;
use weak_tt::primitives::RunSeed;

#[derive(Debug, Parser)]
#[command(name = "weak-tt", version, about = "Weak traitor tracing, index-hiding games and the tracing attack on private query release")]
struct Cli {
    /// Master seed; every random choice is derived from it.
    #[arg(long, global = true, env = "WEAK_TT_SEED", default_value_t = 0)]
    seed: u64,
    /// Write the report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the report on stdout instead of a summary line.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Include wall-clock timings, which makes reports differ run to run.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate keys for n users.
    Setup(SetupArgs),
    /// Encrypt to an index j in 0..=n.
    Encrypt(EncryptArgs),
    /// Decrypt a ciphertext with one or every user key.
    Decrypt(DecryptArgs),
    /// Play a security game by Monte Carlo.
    Game {
        #[command(subcommand)]
        game: GameCommand,
    },
    /// Trace summaries released by a query mechanism.
    Attack(AttackArgs),
    /// Run an exact or exhaustive check.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Time the main operations.
    Bench(BenchArgs),
}

fn tag_of(v: &impl Serialize, tag: &str) -> Result<(String, Value), CliError> {
    let mut v = serde_json::to_value(v)?;
    let name = v
        .as_object_mut()
        .and_then(|o| o.remove(tag))
        .and_then(|t| t.as_str().map(str::to_owned))
        .unwrap_or_default();
    Ok((name, v))
}

/// Runs the command; returns its name, its arguments and the outcome.
fn dispatch(cli: &Cli) -> Result<(String, Value, Outcome), CliError> {
    let root = RunSeed::from_master(cli.seed);
    let (name, args) = match &cli.command {
        Command::Setup(a) => ("setup".to_owned(), serde_json::to_value(a)?),
        Command::Encrypt(a) => ("encrypt".to_owned(), serde_json::to_value(a)?),
        Command::Decrypt(a) => ("decrypt".to_owned(), serde_json::to_value(a)?),
        Command::Game { game } => {
            let (g, v) = tag_of(game, "game")?;
            (format!("game {g}"), v)
        }
        Command::Attack(a) => ("attack".to_owned(), serde_json::to_value(a)?),
        Command::Verify { check } => {
            let (c, v) = tag_of(check, "check")?;
            (format!("verify {c}"), v)
        }
        Command::Bench(a) => ("bench".to_owned(), serde_json::to_value(a)?),
    };
    let seed = root.derive(name.as_str());
    let outcome = match &cli.command {
        Command::Setup(a) => commands::keys::setup(a, &seed)?,
        Command::Encrypt(a) => commands::keys::encrypt(a, &seed)?,
        Command::Decrypt(a) => commands::keys::decrypt_cmd(a, &seed)?,
        Command::Game { game } => commands::game::run(game, &seed)?,
        Command::Attack(a) => commands::attack::run(a, &seed)?,
        Command::Verify { check } => commands::verify::run(check, &seed)?,
        Command::Bench(a) => commands::bench::run(a, &seed)?,
    };
    Ok((name, args, outcome))
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::usage(format!("--threads: {e}")))?;
    }
    let start = Instant::now();
    let (name, args, outcome) = dispatch(cli)?;
    let config = json!({ "command": name, "seed": cli.seed, "args": args });
    let timings = cli.timings.then(|| {
        let mut t: BTreeMap<String, f64> = outcome.timings.clone();
        t.insert("total_ms".into(), start.elapsed().as_secs_f64() * 1e3);
        t
    });
    let text = report::render(&name, &config, &outcome, timings)?;
    if let Some(path) = &cli.out {
        report::write(path, &text)?;
    }
    if cli.json {
        print!("{text}");
    } else {
        println!("{}: {}", serde_json::to_value(outcome.status)?.as_str().unwrap_or(""), outcome.summary);
    }
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("weak-tt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
