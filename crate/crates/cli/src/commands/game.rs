//! `game {index-hiding|two-index|puncture|input-matching}`.

use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::args::{MDefault, SchemeArgs};
use crate::error::CliError;
use crate::report::{Outcome, Status};
use weak_tt::games::{
    adversary_by_name, exact_input_matching, run_index_hiding, run_input_matching, run_puncture_game,
    run_two_index_hiding, GameOptions, GameResult, PrfAdversary, PrfGameParams, DEFAULT_TRIALS,
};
use weak_tt::primitives::RunSeed;

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "game", rename_all = "kebab-case")]
pub enum GameCommand {
    /// One challenge to i* - b; guess b.
    IndexHiding(IndexArgs),
    /// Two challenges to i* - b0 and i* - b1; guess b0 xor b1.
    TwoIndex(IndexArgs),
    /// Tell PRF(x*) from random given the key punctured at x*.
    Puncture(PunctureArgs),
    /// Tell whether two punctured preimage samples hit the same target.
    InputMatching(MatchingArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IndexArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 1)]
    pub i_star: u64,
    /// constant, constant-1, black-box-decrypt, white-box-transparent or synthetic-<q0>-<q1>
    #[arg(long, default_value = "constant")]
    pub adversary: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    /// Play against this hybrid instead of the real scheme.
    #[arg(long)]
    pub hybrid_level: Option<u8>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PunctureArgs {
    #[arg(long = "lambda", default_value_t = 64)]
    pub lambda_bits: u32,
    #[arg(long, default_value_t = 64)]
    pub domain: u64,
    #[arg(long, default_value_t = 16)]
    pub range: u64,
    #[arg(long, default_value_t = 0)]
    pub x_star: u64,
    /// constant, constant-1 or re-evaluate
    #[arg(long, default_value = "constant")]
    pub adversary: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MatchingArgs {
    #[arg(long = "lambda", default_value_t = 64)]
    pub lambda_bits: u32,
    /// Domain size m.
    #[arg(long, default_value_t = 6)]
    pub domain: u64,
    /// Range size n.
    #[arg(long, default_value_t = 2)]
    pub range: u64,
    #[arg(long, default_value_t = 0)]
    pub y0: u64,
    #[arg(long, default_value_t = 1)]
    pub y1: u64,
    /// constant, constant-1, re-evaluate or equality
    #[arg(long, default_value = "equality")]
    pub adversary: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    /// Also compute the optimal advantage over random function tables.
    #[arg(long)]
    pub exact: bool,
}

fn summary(g: &GameResult) -> String {
    format!(
        "{} vs {}: advantage {:.4} (99% CI [{:.4}, {:.4}]) over {} trials",
        g.game,
        g.adversary,
        weak_tt::json::to_f64(&g.advantage_estimate),
        g.ci_low,
        g.ci_high,
        g.trials
    )
}

const HOEFFDING: &str = "half-width = sqrt(ln(2/(1 - 0.99)) / (2 trials))";

pub fn run(cmd: &GameCommand, seed: &RunSeed) -> Result<Outcome, CliError> {
    match cmd {
        GameCommand::IndexHiding(a) | GameCommand::TwoIndex(a) => {
            let (params, formula) = a.scheme.resolve(MDefault::Simulation)?;
            let adversary = adversary_by_name(&a.adversary)?;
            let options = GameOptions { hybrid_level: a.hybrid_level };
            let g = if matches!(cmd, GameCommand::IndexHiding(_)) {
                run_index_hiding(&params, a.i_star, adversary.as_ref(), a.trials, seed, options)?
            } else {
                run_two_index_hiding(&params, a.i_star, adversary.as_ref(), a.trials, seed, options)?
            };
            let line = summary(&g);
            Ok(Outcome::new(Status::Complete, json!({ "params": params, "game": g }), line)?
                .formula("m", formula)
                .formula("ci", HOEFFDING)
                .formula("thresholds", "1/(2en), 1/(4en), 1/(200n^3)"))
        }
        GameCommand::Puncture(a) => {
            let p = PrfGameParams { lambda_bits: a.lambda_bits, domain: a.domain, range: a.range };
            let g = run_puncture_game(p, a.x_star, PrfAdversary::by_name(&a.adversary)?, a.trials, seed)?;
            let line = summary(&g);
            Ok(Outcome::new(Status::Complete, json!({ "params": p, "game": g }), line)?.formula("ci", HOEFFDING))
        }
        GameCommand::InputMatching(a) => {
            let p = PrfGameParams { lambda_bits: a.lambda_bits, domain: a.domain, range: a.range };
            let g = run_input_matching(p, a.y0, a.y1, PrfAdversary::by_name(&a.adversary)?, a.trials, seed)?;
            let exact = if a.exact {
                Some(exact_input_matching(a.domain, a.range, a.y0, a.y1)?)
            } else {
                None
            };
            let mut line = summary(&g);
            if let Some(e) = &exact {
                line.push_str(&format!("; optimal {}", e.optimal_advantage));
            }
            let mut out = Outcome::new(Status::Complete, json!({ "params": p, "game": g, "exact": exact }), line)?
                .formula("ci", HOEFFDING);
            if exact.is_some() {
                out = out.formula(
                    "exact",
                    "sum over views of max_b Pr[view, b0 xor b1 = b] - 1/2, uniform surjective tables",
                );
            }
            Ok(out)
        }
    }
}
