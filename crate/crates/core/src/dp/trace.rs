//! The tracer and the privacy-violation experiment built on it.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::mechanism::{check_accuracy, run_mechanism, Calibration, MechanismKind, Summary};
use super::{make_hardness_instance, AccuracyParams, PrivacyParams};
use crate::error::{Error, Result};
use crate::json::to_f64;
use crate::primitives::RunSeed;
use crate::schemes::{MasterKey, SchemeParams};

pub const DEFAULT_SAMPLES_PER_INDEX: u64 = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceOptions {
    pub samples_per_index: u64,
    /// A query "reads 0" when `q_c(S)` is at most this.
    #[serde(serialize_with = "crate::json::ratio")]
    pub threshold: BigRational,
    /// Smallest gap that leads to an accusation; `1/n` when unset.
    #[serde(serialize_with = "crate::json::opt_ratio")]
    pub gap_threshold: Option<BigRational>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            samples_per_index: DEFAULT_SAMPLES_PER_INDEX,
            threshold: BigRational::new(1.into(), 3.into()),
            gap_threshold: None,
        }
    }
}

impl TraceOptions {
    fn gap_threshold(&self, n: u64) -> BigRational {
        self.gap_threshold
            .clone()
            .unwrap_or_else(|| BigRational::new(1.into(), BigInt::from(n)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceResult {
    pub n: u64,
    pub samples_per_index: u64,
    /// `curve[j] ≈ Pr_{c ← Enc(mk, j)}[q_c(S) ≤ threshold]`, `j = 0..=n`.
    #[serde(serialize_with = "crate::json::ratios")]
    pub curve: Vec<BigRational>,
    /// `gaps[i - 1] = curve[i - 1] - curve[i]`.
    #[serde(serialize_with = "crate::json::ratios")]
    pub gaps: Vec<BigRational>,
    #[serde(serialize_with = "crate::json::ratio")]
    pub gap_threshold: BigRational,
    /// Largest gap.
    #[serde(serialize_with = "crate::json::ratio")]
    pub gap: BigRational,
    pub accused: Option<u64>,
}

impl TraceResult {
    /// Whether the gap at `i` clears the threshold.
    pub fn separates(&self, i: u64) -> bool {
        i >= 1 && i as usize <= self.gaps.len() && self.gaps[(i - 1) as usize] > self.gap_threshold
    }
}

/// Estimates the curve with fresh encryptions and accuses the index of the
/// largest gap (the smallest such index on ties) if it exceeds the threshold.
pub fn trace(summary: &Summary, mk: &MasterKey, options: &TraceOptions, seed: &RunSeed) -> Result<TraceResult> {
    let n = mk.n();
    let t = options.samples_per_index;
    if t == 0 {
        return Err(Error::param("need at least one sample per index"));
    }
    let curve = (0..=n)
        .into_par_iter()
        .map(|j| {
            let mut hits = 0u64;
            for k in 0..t {
                let c = mk.encrypt(j, &seed.derive(j).derive(k))?;
                if summary.eval(&c)? <= options.threshold {
                    hits += 1;
                }
            }
            Ok(BigRational::new(BigInt::from(hits), BigInt::from(t)))
        })
        .collect::<Result<Vec<_>>>()?;
    let gaps: Vec<BigRational> = curve.windows(2).map(|w| &w[0] - &w[1]).collect();
    let gap_threshold = options.gap_threshold(n);
    let mut best: Option<(usize, &BigRational)> = None;
    for (k, g) in gaps.iter().enumerate() {
        if best.is_none_or(|(_, b)| g > b) {
            best = Some((k, g));
        }
    }
    let (accused, gap) = match best {
        Some((k, g)) => ((*g > gap_threshold).then_some(k as u64 + 1), g.clone()),
        None => (None, BigRational::from_integer(0.into())),
    };
    Ok(TraceResult {
        n,
        samples_per_index: t,
        curve,
        gaps,
        gap_threshold,
        gap,
        accused,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOptions {
    pub mechanism: MechanismKind,
    pub runs: u64,
    pub privacy: PrivacyParams,
    pub accuracy: AccuracyParams,
    pub trace: TraceOptions,
    /// Fresh encryptions per accuracy check when `Q` cannot be enumerated.
    pub accuracy_budget: u64,
    /// Keep a random subset of this many queries. Only accuracy is measured
    /// then; the tracer is not run.
    pub queries: Option<u64>,
}

impl ExperimentOptions {
    pub fn standard(mechanism: MechanismKind, runs: u64, n: u64) -> Self {
        ExperimentOptions {
            mechanism,
            runs,
            privacy: PrivacyParams::standard(n),
            accuracy: AccuracyParams::standard(n),
            trace: TraceOptions::default(),
            accuracy_budget: 1000,
            queries: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: u64,
    pub accurate: bool,
    #[serde(serialize_with = "crate::json::ratio")]
    pub max_error: BigRational,
    pub accused: Option<u64>,
    pub in_set: Option<bool>,
    pub neighbor_accused: Option<u64>,
    pub neighbor_in_set: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrivacyReport {
    pub scheme: String,
    pub n: u64,
    pub m: u64,
    pub mechanism: MechanismKind,
    pub runs: u64,
    pub privacy: PrivacyParams,
    pub accuracy: AccuracyParams,
    pub queries: Option<u64>,
    pub calibration: Option<Calibration>,
    pub accurate_runs: u64,
    /// At least a `1 - β` fraction of runs were accurate.
    pub accuracy_gate: bool,
    /// `accusations[i]` counts runs accusing `i` on `D`; index 0 counts no accusation.
    pub accusations: Vec<u64>,
    /// Most frequently accused index on `D` (smallest on ties).
    pub target: Option<u64>,
    /// Fraction of runs whose summary separates `target - 1` from `target`, on `D`.
    #[serde(serialize_with = "crate::json::opt_ratio")]
    pub p_dataset: Option<BigRational>,
    /// The same on `D_{-target}`.
    #[serde(serialize_with = "crate::json::opt_ratio")]
    pub p_neighbor: Option<BigRational>,
    /// Accusation frequency of `target` on `D` and on `D_{-target}`.
    #[serde(serialize_with = "crate::json::opt_ratio")]
    pub accused_target_dataset: Option<BigRational>,
    #[serde(serialize_with = "crate::json::opt_ratio")]
    pub accused_target_neighbor: Option<BigRational>,
    /// `e^ε·p_neighbor + δ`.
    #[serde(serialize_with = "crate::json::opt_decimal")]
    pub dp_bound: Option<f64>,
    /// `p_dataset - dp_bound`; positive means the summaries violate `(ε, δ)`-DP.
    #[serde(serialize_with = "crate::json::opt_decimal")]
    pub margin: Option<f64>,
    /// Claimed only when the margin is positive and the accuracy gate holds.
    pub violation: Option<bool>,
    pub per_run: Vec<RunRecord>,
    pub note: &'static str,
}

const NOTE: &str = "With a transparent obfuscator this shows that accurate summaries are traceable; \
it says nothing about computational hardness.";

fn ratio(k: u64, runs: u64) -> BigRational {
    BigRational::new(BigInt::from(k), BigInt::from(runs))
}

/// Runs the mechanism on `D` and traces; then, for the most accused index
/// `i*`, runs it on `D_{-i*}` and compares how often the summary separates
/// `i* - 1` from `i*` in the two worlds.
pub fn privacy_violation_experiment(
    params: &SchemeParams,
    options: &ExperimentOptions,
    seed: &RunSeed,
) -> Result<PrivacyReport> {
    let n = params.n;
    let runs = options.runs;
    let first = (0..runs)
        .into_par_iter()
        .map(|r| {
            let rs = seed.derive(r);
            let mut hi = make_hardness_instance(params, &rs.derive("setup"))?;
            if let Some(k) = options.queries {
                hi.restrict_queries(k, &rs.derive("queries"))?;
            }
            let s = run_mechanism(options.mechanism, &hi.dataset, &hi, options.privacy, &rs.derive("mechanism"))?;
            let acc = check_accuracy(
                &s,
                &hi,
                &hi.dataset,
                &options.accuracy.alpha,
                options.accuracy_budget,
                &rs.derive("accuracy"),
            )?;
            // The tracer needs fresh queries from all of [m]; a restricted table cannot answer them.
            let tr = match options.queries {
                None => Some(trace(&s, &hi.instance.master(), &options.trace, &rs.derive("trace"))?),
                Some(_) => None,
            };
            Ok((hi, s.calibration().cloned(), acc, tr))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut accusations = vec![0u64; n as usize + 1];
    for tr in first.iter().filter_map(|f| f.3.as_ref()) {
        accusations[tr.accused.unwrap_or(0) as usize] += 1;
    }
    let target = (1..=n)
        .filter(|&i| accusations[i as usize] > 0)
        .max_by_key(|&i| (accusations[i as usize], std::cmp::Reverse(i)));

    let second = match target {
        Some(i) => (0..runs)
            .into_par_iter()
            .map(|r| {
                let rs = seed.derive(r);
                let hi = &first[r as usize].0;
                let d = hi.dataset.without(i)?;
                let s = run_mechanism(options.mechanism, &d, hi, options.privacy, &rs.derive("mechanism-neighbor"))?;
                trace(&s, &hi.instance.master(), &options.trace, &rs.derive("trace-neighbor")).map(Some)
            })
            .collect::<Result<Vec<_>>>()?,
        None => vec![None; runs as usize],
    };

    let per_run: Vec<RunRecord> = first
        .iter()
        .zip(&second)
        .enumerate()
        .map(|(r, ((_, _, acc, tr), tr2))| RunRecord {
            run: r as u64,
            accurate: acc.pass,
            max_error: acc.max_error.clone(),
            accused: tr.as_ref().and_then(|t| t.accused),
            in_set: target.and_then(|i| tr.as_ref().map(|t| t.separates(i))),
            neighbor_accused: tr2.as_ref().and_then(|t| t.accused),
            neighbor_in_set: target.and_then(|i| tr2.as_ref().map(|t| t.separates(i))),
        })
        .collect();

    let accurate_runs = per_run.iter().filter(|r| r.accurate).count() as u64;
    let accuracy_gate =
        runs > 0 && ratio(accurate_runs, runs) >= BigRational::from_integer(1.into()) - &options.accuracy.beta;
    let count = |f: &dyn Fn(&RunRecord) -> bool| per_run.iter().filter(|r| f(r)).count() as u64;
    let (p_dataset, p_neighbor, acc_d, acc_n, dp_bound, margin, violation) = match target {
        Some(i) if runs > 0 => {
            let pd = ratio(count(&|r| r.in_set == Some(true)), runs);
            let pn = ratio(count(&|r| r.neighbor_in_set == Some(true)), runs);
            let bound = options.privacy.epsilon.exp() * to_f64(&pn) + options.privacy.delta;
            let margin = to_f64(&pd) - bound;
            (
                Some(pd),
                Some(pn),
                Some(ratio(count(&|r| r.accused == Some(i)), runs)),
                Some(ratio(count(&|r| r.neighbor_accused == Some(i)), runs)),
                Some(bound),
                Some(margin),
                Some(accuracy_gate && margin > 0.0),
            )
        }
        _ if runs > 0 && options.queries.is_none() => (None, None, None, None, None, None, Some(false)),
        _ => (None, None, None, None, None, None, None),
    };

    Ok(PrivacyReport {
        scheme: params.scheme.name().to_owned(),
        n,
        m: params.m,
        mechanism: options.mechanism,
        runs,
        privacy: options.privacy,
        accuracy: options.accuracy.clone(),
        queries: options.queries,
        calibration: first.first().and_then(|f| f.1.clone()),
        accurate_runs,
        accuracy_gate,
        accusations,
        target,
        p_dataset,
        p_neighbor,
        accused_target_dataset: acc_d,
        accused_target_neighbor: acc_n,
        dp_bound,
        margin,
        violation,
        per_run,
        note: NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{constant_summary, make_hardness_instance, Dataset};
    use crate::schemes::SchemeKind;

    fn sc(n: u64, m: u64) -> SchemeParams {
        SchemeParams::new(SchemeKind::ShortCtext, 64, n, Some(m)).unwrap()
    }

    fn r(a: u64, b: u64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn exact_trace(d: &Dataset, seed: u64) -> TraceResult {
        let hi = make_hardness_instance(&sc(6, 64), &RunSeed::from_master(seed)).unwrap();
        let s = run_mechanism(MechanismKind::Exact, d, &hi, PrivacyParams::standard(6), &RunSeed::from_master(0))
            .unwrap_or_else(|_| unreachable!());
        let opts = TraceOptions {
            samples_per_index: 20,
            ..TraceOptions::default()
        };
        trace(&s, &hi.instance.master(), &opts, &RunSeed::from_master(1)).unwrap()
    }

    #[test]
    fn exact_summary_accuses_three() {
        let hi = make_hardness_instance(&sc(6, 64), &RunSeed::from_master(5)).unwrap();
        let tr = exact_trace(&hi.dataset, 5);
        let expect: Vec<_> = (0..=6).map(|j| r(u64::from(j <= 2), 1)).collect();
        assert_eq!(tr.curve, expect);
        assert_eq!(tr.accused, Some(3));
        assert_eq!(tr.gap, r(1, 1));
    }

    #[test]
    fn removing_three_moves_the_accusation() {
        let hi = make_hardness_instance(&sc(6, 64), &RunSeed::from_master(5)).unwrap();
        let tr = exact_trace(&hi.dataset.without(3).unwrap(), 5);
        assert_eq!(tr.accused, Some(4));
        assert!(!tr.separates(3));
    }

    #[test]
    fn constant_summary_accuses_nobody() {
        let hi = make_hardness_instance(&sc(4, 32), &RunSeed::from_master(2)).unwrap();
        let s = constant_summary(r(1, 2));
        let tr = trace(&s, &hi.instance.master(), &TraceOptions::default(), &RunSeed::from_master(0)).unwrap();
        assert_eq!(tr.accused, None);
        assert!(tr.curve.iter().all(|c| *c == r(0, 1)));
    }

    #[test]
    fn zero_runs_is_an_empty_report() {
        let opts = ExperimentOptions::standard(MechanismKind::Exact, 0, 6);
        let rep = privacy_violation_experiment(&sc(6, 64), &opts, &RunSeed::from_master(0)).unwrap();
        assert_eq!(rep.violation, None);
        assert!(rep.per_run.is_empty());
    }

    #[test]
    fn exact_mechanism_violates_privacy() {
        let mut opts = ExperimentOptions::standard(MechanismKind::Exact, 6, 6);
        opts.trace.samples_per_index = 20;
        let rep = privacy_violation_experiment(&sc(6, 64), &opts, &RunSeed::from_master(9)).unwrap();
        assert_eq!(rep.target, Some(3));
        assert_eq!(rep.p_dataset, Some(r(1, 1)));
        assert_eq!(rep.p_neighbor, Some(r(0, 1)));
        assert_eq!(rep.violation, Some(true));
    }
}
