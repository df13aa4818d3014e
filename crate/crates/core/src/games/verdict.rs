//! Weak index hiding as a verdict over per-decoder advantages.
//!
//! A decoder is one `(setup, S = A(sk_{-i*}))` draw. Its advantage is estimated
//! from fresh challenges with that decoder held fixed.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::adversary::{Adversary, AdversaryView, Challenge};
use super::index_hiding::{run_two_index_hiding, GameOptions, GameResult};
use super::{hoeffding_half_width, Thresholds, CONFIDENCE};
use crate::error::{Error, Result};
use crate::json::to_f64;
use crate::primitives::RunSeed;
use crate::schemes::{setup, SchemeParams, UserKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Fail dominates, then Inconclusive.
    fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    fn against(ci_low: f64, ci_high: f64, limit: f64) -> Verdict {
        if ci_high <= limit {
            Verdict::Pass
        } else if ci_low > limit {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoderAdvantage {
    pub decoder: u64,
    pub challenges: u64,
    pub successes: u64,
    /// `Adv[i*, k, S]` estimate.
    #[serde(serialize_with = "crate::json::ratio")]
    pub advantage: BigRational,
    #[serde(serialize_with = "crate::json::decimal")]
    pub ci_low: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub ci_high: f64,
    pub build_failed: bool,
}

/// Per-decoder evidence for one `i*`, with an optional TwoIndexHiding run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexEvidence {
    pub i_star: u64,
    pub decoders: Vec<DecoderAdvantage>,
    pub two_index: Option<GameResult>,
}

/// Draws `decoders` independent `(setup, S)` pairs and plays `challenges`
/// single-challenge rounds against each.
pub fn decoder_advantages(
    params: &SchemeParams,
    i_star: u64,
    adversary: &dyn Adversary,
    decoders: u64,
    challenges: u64,
    seed: &RunSeed,
) -> Result<Vec<DecoderAdvantage>> {
    if i_star == 0 || i_star > params.n {
        return Err(Error::param(format!("i* = {i_star} out of 1..={}", params.n)));
    }
    (0..decoders)
        .into_par_iter()
        .map(|d| {
            let ds = seed.derive(d);
            let inst = setup(params, &ds.derive("setup"))?;
            let held: Vec<UserKey> = inst.users().into_iter().filter(|k| k.index() != i_star).collect();
            let view = AdversaryView {
                scheme: params.scheme,
                n: params.n,
                m: params.m,
                i_star,
                keys: &held,
            };
            let built = adversary.build(&view);
            let mut successes = 0u64;
            if let Ok(decoder) = &built {
                let mut bits = ds.derive("b").rng();
                let mut rng = ds.derive("adversary").rng();
                for t in 0..challenges {
                    let b: u8 = bits.random_range(0..2);
                    let c = inst.encrypt(i_star - u64::from(b), &ds.derive("c").derive(t))?;
                    if decoder.guess(Challenge::Single(&c), &mut rng).ok() == Some(b) {
                        successes += 1;
                    }
                }
            }
            Ok(decoder_summary(d, challenges, successes, built.is_err()))
        })
        .collect()
}

fn decoder_summary(decoder: u64, challenges: u64, successes: u64, build_failed: bool) -> DecoderAdvantage {
    let advantage = if challenges == 0 {
        BigRational::from_integer(0.into())
    } else {
        BigRational::new(BigInt::from(successes), BigInt::from(challenges)) - BigRational::new(1.into(), 2.into())
    };
    let est = to_f64(&advantage);
    let hw = hoeffding_half_width(challenges, CONFIDENCE);
    DecoderAdvantage {
        decoder,
        challenges,
        successes,
        advantage,
        ci_low: (est - hw).max(-0.5),
        ci_high: (est + hw).min(0.5),
        build_failed,
    }
}

/// Evidence for every `i* ∈ [n]`. `two_trials = 0` skips the TwoIndexHiding runs.
pub fn collect_evidence(
    params: &SchemeParams,
    adversary: &dyn Adversary,
    decoders: u64,
    challenges: u64,
    two_trials: u64,
    seed: &RunSeed,
) -> Result<Vec<IndexEvidence>> {
    (1..=params.n)
        .map(|i_star| {
            let decoders =
                decoder_advantages(params, i_star, adversary, decoders, challenges, &seed.derive("decoders").derive(i_star))?;
            let two_index = if two_trials > 0 {
                Some(run_two_index_hiding(
                    params,
                    i_star,
                    adversary,
                    two_trials,
                    &seed.derive("two-index").derive(i_star),
                    GameOptions::default(),
                )?)
            } else {
                None
            };
            Ok(IndexEvidence {
                i_star,
                decoders,
                two_index,
            })
        })
        .collect()
}

/// Markov's inequality on the empirical distribution of advantage estimates:
/// the fraction above `t` is at most `mean(Adv²)/t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovCheck {
    #[serde(serialize_with = "crate::json::decimal")]
    pub mean_square: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub fraction_above: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub bound: f64,
    pub holds: bool,
}

impl MarkovCheck {
    pub fn new(advantages: &[f64], threshold: f64) -> Self {
        let k = advantages.len().max(1) as f64;
        let mean_square = advantages.iter().map(|a| a * a).sum::<f64>() / k;
        let fraction_above = advantages.iter().filter(|a| **a > threshold).count() as f64 / k;
        let bound = mean_square / (threshold * threshold);
        MarkovCheck {
            mean_square,
            fraction_above,
            bound,
            holds: fraction_above <= bound,
        }
    }
}

/// The constants in the passage from `TwoAdv ≤ 1/(200n³)` to weak index hiding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaConstants {
    pub n: u64,
    /// Mean-square bound obtained from the two-challenge target, `1/(400n³)`.
    #[serde(serialize_with = "crate::json::decimal")]
    pub mean_square_bound: f64,
    /// Markov's bound on `Pr[Adv > 1/(4en)]`, `(4en)²/(400n³) = e²/(25n)`.
    #[serde(serialize_with = "crate::json::decimal")]
    pub markov_bound: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub allowed: f64,
    /// Whether `markov_bound ≤ 1/(2en)`; false for every `n`.
    pub chain_closes: bool,
    /// Largest `TwoAdv` target for which the chain does close, `1/(16e³n³)`.
    #[serde(serialize_with = "crate::json::decimal")]
    pub sufficient_two_adv: f64,
}

pub fn lemma_constants(n: u64) -> LemmaConstants {
    let t = Thresholds::new(n);
    let nf = n as f64;
    let e = std::f64::consts::E;
    let mean_square_bound = 1.0 / (400.0 * nf.powi(3));
    let markov_bound = mean_square_bound / (t.one_over_4en * t.one_over_4en);
    LemmaConstants {
        n,
        mean_square_bound,
        markov_bound,
        allowed: t.one_over_2en,
        chain_closes: markov_bound <= t.one_over_2en,
        sufficient_two_adv: 1.0 / (16.0 * e.powi(3) * nf.powi(3)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexVerdict {
    pub i_star: u64,
    pub decoders: u64,
    /// Decoders whose interval lies entirely above the advantage threshold.
    pub surely_good: u64,
    /// Decoders whose interval reaches above the advantage threshold.
    pub possibly_good: u64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub fraction_low: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub fraction_high: f64,
    pub verdict: Verdict,
    pub markov: MarkovCheck,
    pub two_adv_verdict: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictReport {
    pub n: u64,
    /// Multiplier applied to the advantage threshold and the allowed fraction.
    #[serde(serialize_with = "crate::json::decimal")]
    pub scale: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub advantage_threshold: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub allowed_fraction: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub two_adv_target: f64,
    pub per_index: Vec<IndexVerdict>,
    pub verdict: Verdict,
    /// Verdict of the two-challenge route, when every index has a run.
    pub two_adv_verdict: Option<Verdict>,
    pub lemma: LemmaConstants,
}

impl VerdictReport {
    /// `Some(true)` on Pass, `Some(false)` on Fail, `None` when inconclusive.
    pub fn as_bool(&self) -> Option<bool> {
        match self.verdict {
            Verdict::Pass => Some(true),
            Verdict::Fail => Some(false),
            Verdict::Inconclusive => None,
        }
    }
}

/// Checks `Pr_{k,S}[Adv[i*, k, S] > scale/(4en)] ≤ scale/(2en)` for every `i*`.
///
/// Decoders are sorted three ways by their own intervals; the outer fraction
/// gets a further Hoeffding margin over the number of decoders. Pass needs
/// the upper end at or below the allowed fraction, Fail the lower end above it.
pub fn weak_index_hiding_verdict(evidence: &[IndexEvidence], n: u64, scale: f64) -> Result<VerdictReport> {
    if n == 0 || !(scale.is_finite() && scale > 0.0) {
        return Err(Error::param(format!("need n ≥ 1 and a positive scale, got n = {n}, scale = {scale}")));
    }
    if evidence.is_empty() {
        return Err(Error::param("no evidence to judge"));
    }
    let t = Thresholds::new(n);
    let threshold = scale * t.one_over_4en;
    let allowed = scale * t.one_over_2en;
    let two_target = t.one_over_200n3;

    let per_index: Vec<IndexVerdict> = evidence
        .iter()
        .map(|ev| {
            let d = ev.decoders.len() as u64;
            let surely = ev.decoders.iter().filter(|a| a.ci_low > threshold).count() as u64;
            let possibly = ev.decoders.iter().filter(|a| a.ci_high > threshold).count() as u64;
            let hw = hoeffding_half_width(d, CONFIDENCE);
            let df = d.max(1) as f64;
            let fraction_low = (surely as f64 / df - hw).max(0.0);
            let fraction_high = (possibly as f64 / df + hw).min(1.0);
            let estimates: Vec<f64> = ev.decoders.iter().map(|a| to_f64(&a.advantage)).collect();
            IndexVerdict {
                i_star: ev.i_star,
                decoders: d,
                surely_good: surely,
                possibly_good: possibly,
                fraction_low,
                fraction_high,
                verdict: Verdict::against(fraction_low, fraction_high, allowed),
                markov: MarkovCheck::new(&estimates, threshold),
                two_adv_verdict: ev
                    .two_index
                    .as_ref()
                    .map(|g| Verdict::against(g.ci_low, g.ci_high, two_target)),
            }
        })
        .collect();

    let verdict = per_index.iter().map(|v| v.verdict).fold(Verdict::Pass, Verdict::combine);
    let two_adv_verdict = per_index
        .iter()
        .map(|v| v.two_adv_verdict)
        .collect::<Option<Vec<_>>>()
        .map(|vs| vs.into_iter().fold(Verdict::Pass, Verdict::combine));
    Ok(VerdictReport {
        n,
        scale,
        advantage_threshold: threshold,
        allowed_fraction: allowed,
        two_adv_target: two_target,
        per_index,
        verdict,
        two_adv_verdict,
        lemma: lemma_constants(n),
    })
}
