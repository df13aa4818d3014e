//! Summaries, the baseline mechanisms that produce them, and accuracy checks.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use super::{Dataset, HardnessInstance, PrivacyParams, QueryFamily};
use crate::error::{Error, Result};
use crate::primitives::RunSeed;
use crate::schemes::short_key::SkUserKey;
use crate::schemes::{decrypt, Ciphertext, Instance, UserKey};

/// Largest universe the noisy histogram will hold.
pub const MAX_UNIVERSE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MechanismKind {
    /// True answer per enumerated query.
    Exact,
    /// The dataset itself; answers are recomputed.
    Raw,
    /// Independent Gaussian noise per enumerated query.
    NoisyTable,
    /// Gaussian noise on the frequency of every universe element.
    NoisyHistogram,
}

impl MechanismKind {
    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::Exact => "exact",
            MechanismKind::Raw => "raw",
            MechanismKind::NoisyTable => "noisy-table",
            MechanismKind::NoisyHistogram => "noisy-histogram",
        }
    }
}

impl std::str::FromStr for MechanismKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exact" => MechanismKind::Exact,
            "raw" => MechanismKind::Raw,
            "noisy-table" => MechanismKind::NoisyTable,
            "noisy-histogram" => MechanismKind::NoisyHistogram,
            _ => return Err(Error::Configuration(format!("unknown mechanism {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Composition {
    Single,
    Basic,
    Advanced,
}

/// How the Gaussian noise scale was chosen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub formula: String,
    pub composition: Composition,
    pub queries: u64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub sensitivity: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub epsilon: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub delta: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub epsilon0: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub delta0: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub sigma: f64,
}

const GAUSSIAN: &str = "sigma = sensitivity * sqrt(2 ln(1.25/delta0)) / epsilon0";

fn gaussian_sigma(sensitivity: f64, epsilon0: f64, delta0: f64) -> f64 {
    sensitivity * (2.0 * (1.25 / delta0).ln()).sqrt() / epsilon0
}

/// Per-query `ε0` under advanced composition: solves
/// `ε0·sqrt(2k ln(1/δ')) + k·ε0·(e^ε0 - 1) = ε` by bisection.
fn advanced_epsilon0(epsilon: f64, k: u64, delta_prime: f64) -> f64 {
    let kf = k as f64;
    let total = |e0: f64| e0 * (2.0 * kf * (1.0 / delta_prime).ln()).sqrt() + kf * e0 * e0.exp_m1();
    let (mut lo, mut hi) = (0.0, epsilon);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

impl Calibration {
    /// Noisy table over `k` queries of sensitivity `1/n`; the smaller `σ` of
    /// basic and advanced composition.
    pub fn noisy_table(privacy: PrivacyParams, k: u64, n: u64) -> Self {
        let sensitivity = 1.0 / n as f64;
        let PrivacyParams { epsilon, delta } = privacy;
        let basic_e0 = epsilon / k as f64;
        let basic_d0 = delta / k as f64;
        let basic = gaussian_sigma(sensitivity, basic_e0, basic_d0);
        let adv_d0 = delta / (2.0 * k as f64);
        let adv_e0 = advanced_epsilon0(epsilon, k, delta / 2.0);
        let advanced = gaussian_sigma(sensitivity, adv_e0, adv_d0);
        if advanced < basic {
            Calibration {
                formula: format!(
                    "{GAUSSIAN}; advanced composition: epsilon = epsilon0*sqrt(2k ln(1/delta')) + k*epsilon0*(e^epsilon0 - 1), delta' = delta/2, delta0 = delta/(2k)"
                ),
                composition: Composition::Advanced,
                queries: k,
                sensitivity,
                epsilon,
                delta,
                epsilon0: adv_e0,
                delta0: adv_d0,
                sigma: advanced,
            }
        } else {
            Calibration {
                formula: format!("{GAUSSIAN}; basic composition: epsilon0 = epsilon/k, delta0 = delta/k"),
                composition: Composition::Basic,
                queries: k,
                sensitivity,
                epsilon,
                delta,
                epsilon0: basic_e0,
                delta0: basic_d0,
                sigma: basic,
            }
        }
    }

    /// Noisy histogram: one release with L2 sensitivity `sqrt(2)/n`.
    pub fn noisy_histogram(privacy: PrivacyParams, n: u64) -> Self {
        let sensitivity = std::f64::consts::SQRT_2 / n as f64;
        Calibration {
            formula: format!("{GAUSSIAN}; one release, sensitivity = sqrt(2)/n"),
            composition: Composition::Single,
            queries: 1,
            sensitivity,
            epsilon: privacy.epsilon,
            delta: privacy.delta,
            epsilon0: privacy.epsilon,
            delta0: privacy.delta,
            sigma: gaussian_sigma(sensitivity, privacy.epsilon, privacy.delta),
        }
    }
}

/// A mechanism output together with its evaluator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum Summary {
    ExactTable {
        #[serde(serialize_with = "crate::json::ratio_map")]
        answers: BTreeMap<u64, BigRational>,
    },
    RawDataset {
        dataset: Dataset,
    },
    NoisyTable {
        #[serde(serialize_with = "crate::json::decimal_map")]
        answers: BTreeMap<u64, f64>,
        calibration: Calibration,
    },
    /// `frequencies[(i - 1)·m + s]` estimates the fraction of rows equal to `(i, s)`.
    NoisyHistogram {
        n: u64,
        m: u64,
        #[serde(serialize_with = "crate::json::decimals")]
        frequencies: Vec<f64>,
        calibration: Calibration,
    },
    Constant {
        #[serde(serialize_with = "crate::json::ratio")]
        value: BigRational,
    },
}

fn clamp(x: BigRational) -> BigRational {
    if x.is_negative() {
        BigRational::zero()
    } else if x > BigRational::one() {
        BigRational::one()
    } else {
        x
    }
}

fn exact_float(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvariantViolation(format!("non-finite answer {x}")))
}

impl Summary {
    pub fn variant_name(&self) -> &'static str {
        match self {
            Summary::ExactTable { .. } => "exact-table",
            Summary::RawDataset { .. } => "raw-dataset",
            Summary::NoisyTable { .. } => "noisy-table",
            Summary::NoisyHistogram { .. } => "noisy-histogram",
            Summary::Constant { .. } => "constant",
        }
    }

    pub fn calibration(&self) -> Option<&Calibration> {
        match self {
            Summary::NoisyTable { calibration, .. } | Summary::NoisyHistogram { calibration, .. } => Some(calibration),
            _ => None,
        }
    }

    /// `Eval(S, q_c)` clamped to `[0, 1]`, exactly.
    pub fn eval(&self, c: &Ciphertext) -> Result<BigRational> {
        let table_key = |c: &Ciphertext| match c {
            Ciphertext::ShortCtext(c) => Ok(*c),
            Ciphertext::ShortKey(_) => Err(Error::param("table summaries answer short-ctext queries only")),
        };
        let missing = |c: u64| Error::param(format!("query {c} is not in the table"));
        let raw = match self {
            Summary::ExactTable { answers } => {
                let k = table_key(c)?;
                answers.get(&k).cloned().ok_or_else(|| missing(k))?
            }
            Summary::RawDataset { dataset } => dataset.answer(c)?,
            Summary::NoisyTable { answers, .. } => {
                let k = table_key(c)?;
                exact_float(*answers.get(&k).ok_or_else(|| missing(k))?)?
            }
            Summary::NoisyHistogram { n, m, frequencies, .. } => {
                let mut total = 0.0;
                for i in 1..=*n {
                    for s in 0..*m {
                        let key = UserKey::ShortKey(SkUserKey { i, s });
                        if decrypt(&key, c)?.as_bit() == Some(1) {
                            total += frequencies[((i - 1) * m + s) as usize];
                        }
                    }
                }
                exact_float(total)?
            }
            Summary::Constant { value } => value.clone(),
        };
        Ok(clamp(raw))
    }
}

fn enumerated(family: &QueryFamily) -> Result<&[u64]> {
    match family {
        QueryFamily::Enumerated { ciphertexts } => Ok(ciphertexts),
        QueryFamily::Sampled => Err(Error::Capacity(
            "the query family is not enumerable; use raw or noisy-histogram".into(),
        )),
    }
}

fn true_answers(dataset: &Dataset, cts: &[u64]) -> Result<Vec<BigRational>> {
    cts.par_iter()
        .map(|&c| dataset.answer(&Ciphertext::ShortCtext(c)))
        .collect()
}

/// Runs `kind` on `dataset` over the instance's query family.
pub fn run_mechanism(
    kind: MechanismKind,
    dataset: &Dataset,
    hi: &HardnessInstance,
    privacy: PrivacyParams,
    seed: &RunSeed,
) -> Result<Summary> {
    let n = dataset.n();
    Ok(match kind {
        MechanismKind::Exact => {
            let cts = enumerated(&hi.family)?;
            let answers = true_answers(dataset, cts)?;
            Summary::ExactTable {
                answers: cts.iter().copied().zip(answers).collect(),
            }
        }
        MechanismKind::Raw => Summary::RawDataset {
            dataset: dataset.clone(),
        },
        MechanismKind::NoisyTable => {
            let cts = enumerated(&hi.family)?;
            let calibration = Calibration::noisy_table(privacy, cts.len() as u64, n);
            let noise = Normal::new(0.0, calibration.sigma)
                .map_err(|e| Error::param(format!("noise scale: {e}")))?;
            let answers = true_answers(dataset, cts)?;
            let mut rng = seed.derive("noise").rng();
            let answers = cts
                .iter()
                .zip(answers)
                .map(|(&c, a)| (c, crate::json::to_f64(&a) + noise.sample(&mut rng)))
                .collect();
            Summary::NoisyTable { answers, calibration }
        }
        MechanismKind::NoisyHistogram => {
            let Instance::ShortKey(sys) = &hi.instance else {
                return Err(Error::Capacity(
                    "the short-ctext universe holds obfuscated programs and cannot be enumerated".into(),
                ));
            };
            let m = sys.params.m;
            let universe = n.saturating_mul(m);
            if universe > MAX_UNIVERSE {
                return Err(Error::Capacity(format!(
                    "universe of {universe} keys exceeds {MAX_UNIVERSE}; pass a smaller m"
                )));
            }
            let calibration = Calibration::noisy_histogram(privacy, n);
            let noise = Normal::new(0.0, calibration.sigma)
                .map_err(|e| Error::param(format!("noise scale: {e}")))?;
            let mut frequencies = vec![0.0; universe as usize];
            for row in dataset.rows.iter().flatten() {
                let UserKey::ShortKey(k) = row else {
                    return Err(Error::param("histogram over a mixed dataset"));
                };
                frequencies[((k.i - 1) * m + k.s) as usize] += 1.0 / n as f64;
            }
            let mut rng = seed.derive("noise").rng();
            for f in &mut frequencies {
                *f += noise.sample(&mut rng);
            }
            Summary::NoisyHistogram {
                n,
                m,
                frequencies,
                calibration,
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub queries_checked: u64,
    /// Whether every query in the family was checked.
    pub enumerated: bool,
    #[serde(serialize_with = "crate::json::ratio")]
    pub max_error: BigRational,
    /// Ciphertext index (enumerated) or sample number of the worst query.
    pub worst_query: Option<u64>,
    #[serde(serialize_with = "crate::json::ratio")]
    pub alpha: BigRational,
    pub pass: bool,
}

/// `max |q(D) - q(S)|` over `Q`, or over `budget` fresh encryptions spread
/// round-robin over `j = 0..=n` when `Q` is sampled.
pub fn check_accuracy(
    summary: &Summary,
    hi: &HardnessInstance,
    dataset: &Dataset,
    alpha: &BigRational,
    budget: u64,
    seed: &RunSeed,
) -> Result<AccuracyReport> {
    let (errors, enumerated): (Vec<(u64, BigRational)>, bool) = match &hi.family {
        QueryFamily::Enumerated { ciphertexts } => (
            ciphertexts
                .par_iter()
                .map(|&c| {
                    let q = Ciphertext::ShortCtext(c);
                    Ok((c, (dataset.answer(&q)? - summary.eval(&q)?).abs()))
                })
                .collect::<Result<_>>()?,
            true,
        ),
        QueryFamily::Sampled => {
            let n = hi.n();
            (
                (0..budget)
                    .into_par_iter()
                    .map(|t| {
                        let q = hi.instance.encrypt(t % (n + 1), &seed.derive(t))?;
                        Ok((t, (dataset.answer(&q)? - summary.eval(&q)?).abs()))
                    })
                    .collect::<Result<_>>()?,
                false,
            )
        }
    };
    let mut max_error = BigRational::zero();
    let mut worst_query = None;
    for (q, e) in &errors {
        if worst_query.is_none() || *e > max_error {
            max_error = e.clone();
            worst_query = Some(*q);
        }
    }
    Ok(AccuracyReport {
        queries_checked: errors.len() as u64,
        enumerated,
        pass: max_error <= *alpha,
        max_error,
        worst_query,
        alpha: alpha.clone(),
    })
}

/// `Eval ≡ value`, a summary that ignores the data.
pub fn constant_summary(value: BigRational) -> Summary {
    Summary::Constant { value: clamp(value) }
}

