//! `attack`: run a mechanism, trace its summaries, and measure the DP violation.

use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::args::{parse_rational, MDefault, SchemeArgs};
use crate::error::CliError;
use crate::report::{Outcome, Status};
use num_rational::BigRational;
use weak_tt::dp::{
    privacy_violation_experiment, AccuracyParams, ExperimentOptions, MechanismKind, PrivacyParams,
    DEFAULT_SAMPLES_PER_INDEX,
};
use weak_tt::primitives::RunSeed;

#[derive(Debug, Clone, Args, Serialize)]
pub struct AttackArgs {
    /// exact, raw, noisy-table or noisy-histogram
    #[arg(long, value_parser = parse_mechanism)]
    pub mechanism: MechanismKind,
    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 20)]
    pub runs: u64,
    /// Fresh encryptions per index when tracing.
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_INDEX)]
    pub samples: u64,
    /// Keep a random subset of this many queries (short-ctext).
    #[arg(long)]
    pub queries: Option<u64>,
    /// Defaults to 1.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Defaults to 1/(2n).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Defaults to 1/3.
    #[arg(long, value_parser = parse_rational)]
    #[serde(serialize_with = "weak_tt::json::opt_ratio")]
    pub alpha: Option<BigRational>,
    /// Defaults to 1/(2n).
    #[arg(long, value_parser = parse_rational)]
    #[serde(serialize_with = "weak_tt::json::opt_ratio")]
    pub beta: Option<BigRational>,
    /// Fresh encryptions per accuracy check when queries are sampled.
    #[arg(long, default_value_t = 1000)]
    pub accuracy_budget: u64,
}


fn parse_mechanism(s: &str) -> Result<MechanismKind, String> {
    s.parse().map_err(|e: weak_tt::Error| e.to_string())
}

pub fn run(a: &AttackArgs, seed: &RunSeed) -> Result<Outcome, CliError> {
    let (params, formula) = a.scheme.resolve(MDefault::Cubic)?;
    let n = params.n;
    let mut opts = ExperimentOptions::standard(a.mechanism, a.runs, n);
    let standard = PrivacyParams::standard(n);
    opts.privacy = PrivacyParams::new(a.epsilon.unwrap_or(standard.epsilon), a.delta.unwrap_or(standard.delta))?;
    let acc = AccuracyParams::standard(n);
    opts.accuracy = AccuracyParams::new(a.alpha.clone().unwrap_or(acc.alpha), a.beta.clone().unwrap_or(acc.beta))?;
    opts.trace.samples_per_index = a.samples;
    opts.accuracy_budget = a.accuracy_budget;
    opts.queries = a.queries;
    let report = privacy_violation_experiment(&params, &opts, seed)?;

    let freq = |k: u64| k as f64 / a.runs.max(1) as f64;
    let line = match report.target {
        None if report.queries.is_some() => format!(
            "{} on n = {} with {} queries: {} of {} runs accurate; tracing needs the full family",
            a.mechanism.name(),
            n,
            report.queries.unwrap_or(0),
            report.accurate_runs,
            report.runs
        ),
        Some(t) => format!(
            "{} on n = {}: accused {} in {:.2} of runs on D, {:.2} on D_-{}; violation {}",
            a.mechanism.name(),
            n,
            t,
            freq(report.accusations[t as usize]),
            report.accused_target_neighbor.as_ref().map(weak_tt::json::to_f64).unwrap_or(0.0),
            t,
            match report.violation {
                Some(true) => "yes",
                Some(false) => "no",
                None => "undetermined",
            }
        ),
        None => format!("{} on n = {}: nobody accused", a.mechanism.name(), n),
    };
    let mut out = Outcome::new(Status::Complete, json!({ "params": params, "experiment": report }), line)?
        .formula("m", formula)
        .formula("dp_bound", "e^epsilon * p_neighbor + delta")
        .formula("accuracy_gate", "accurate runs >= (1 - beta) * runs")
        .formula("trace", "accuse argmax_i curve[i-1] - curve[i] when the gap exceeds 1/n");
    if let Some(c) = &report.calibration {
        out = out.formula("sigma", c.formula.clone());
    }
    Ok(out)
}
