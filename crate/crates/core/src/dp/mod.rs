//! Statistical queries over datasets of user keys, baseline mechanisms, and
//! the tracing attack that turns an accurate summary into an accusation.
//!
//! The universe is the key space of a scheme and each ciphertext `c` defines
//! the query `q_c(sk) = Dec(sk, c)`. A removed row is `None` and answers 0.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index::sample;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::primitives::RunSeed;
use crate::schemes::{decrypt, setup, Ciphertext, Instance, SchemeKind, SchemeParams, UserKey};

mod mechanism;
mod trace;

pub use mechanism::{
    check_accuracy, constant_summary, run_mechanism, AccuracyReport, Calibration, Composition, MechanismKind,
    Summary, MAX_UNIVERSE,
};
pub use trace::{
    privacy_violation_experiment, trace, ExperimentOptions, PrivacyReport, TraceOptions,
    TraceResult, DEFAULT_SAMPLES_PER_INDEX,
};

/// `D = (D_1, …, D_n)`; `None` is the ⊥-row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dataset {
    pub rows: Vec<Option<UserKey>>,
}

impl Dataset {
    pub fn honest(inst: &Instance) -> Self {
        Dataset {
            rows: inst.users().into_iter().map(Some).collect(),
        }
    }

    pub fn n(&self) -> u64 {
        self.rows.len() as u64
    }

    /// `D_{-i}`: row `i` (1-based) replaced by ⊥.
    pub fn without(&self, i: u64) -> Result<Self> {
        if i == 0 || i > self.n() {
            return Err(Error::param(format!("row {i} out of 1..={}", self.n())));
        }
        let mut d = self.clone();
        d.rows[(i - 1) as usize] = None;
        Ok(d)
    }

    /// Number of rows with `q_c(row) = 1`.
    pub fn count(&self, c: &Ciphertext) -> Result<u64> {
        let mut ones = 0;
        for row in self.rows.iter().flatten() {
            if decrypt(row, c)?.as_bit() == Some(1) {
                ones += 1;
            }
        }
        Ok(ones)
    }

    /// `q_c(D) = (1/n) Σ q_c(D_i)`.
    pub fn answer(&self, c: &Ciphertext) -> Result<BigRational> {
        if self.rows.is_empty() {
            return Err(Error::param("empty dataset"));
        }
        Ok(BigRational::new(BigInt::from(self.count(c)?), BigInt::from(self.n())))
    }
}

/// The query family `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QueryFamily {
    /// The listed short-ctext ciphertexts, ascending.
    Enumerated { ciphertexts: Vec<u64> },
    /// Fresh short-key encryptions; too many to list.
    Sampled,
}

impl QueryFamily {
    pub fn size(&self) -> Option<u64> {
        match self {
            QueryFamily::Enumerated { ciphertexts } => Some(ciphertexts.len() as u64),
            QueryFamily::Sampled => None,
        }
    }
}

/// Setup output viewed as a hardness instance: the honest dataset and `Q`.
#[derive(Debug, Clone)]
pub struct HardnessInstance {
    pub instance: Instance,
    pub dataset: Dataset,
    pub family: QueryFamily,
}

impl HardnessInstance {
    pub fn n(&self) -> u64 {
        self.instance.n()
    }

    /// Keeps a uniformly random `k`-subset of an enumerated family.
    pub fn restrict_queries(&mut self, k: u64, seed: &RunSeed) -> Result<()> {
        let QueryFamily::Enumerated { ciphertexts } = &self.family else {
            return Err(Error::Capacity("cannot restrict a sampled query family".into()));
        };
        let total = ciphertexts.len();
        if k == 0 || k as usize > total {
            return Err(Error::param(format!("cannot keep {k} of {total} queries")));
        }
        let mut picked: Vec<u64> = sample(&mut seed.rng(), total, k as usize)
            .into_iter()
            .map(|idx| ciphertexts[idx])
            .collect();
        picked.sort_unstable();
        self.family = QueryFamily::Enumerated { ciphertexts: picked };
        Ok(())
    }
}

pub fn make_hardness_instance(params: &SchemeParams, seed: &RunSeed) -> Result<HardnessInstance> {
    let instance = setup(params, seed)?;
    let dataset = Dataset::honest(&instance);
    let family = match params.scheme {
        SchemeKind::ShortCtext => QueryFamily::Enumerated {
            ciphertexts: (0..params.m).collect(),
        },
        SchemeKind::ShortKey => QueryFamily::Sampled,
    };
    Ok(HardnessInstance {
        instance,
        dataset,
        family,
    })
}

/// `(ε, δ)`, defaulting to `(1, 1/(2n))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrivacyParams {
    #[serde(serialize_with = "crate::json::decimal")]
    pub epsilon: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub delta: f64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) || !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param(format!("need ε > 0 and 0 < δ < 1, got ({epsilon}, {delta})")));
        }
        Ok(PrivacyParams { epsilon, delta })
    }

    pub fn standard(n: u64) -> Self {
        PrivacyParams {
            epsilon: 1.0,
            delta: 1.0 / (2.0 * n as f64),
        }
    }
}

/// `(α, β)`, defaulting to `(1/3, 1/(2n))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyParams {
    #[serde(serialize_with = "crate::json::ratio")]
    pub alpha: BigRational,
    #[serde(serialize_with = "crate::json::ratio")]
    pub beta: BigRational,
}

impl AccuracyParams {
    pub fn new(alpha: BigRational, beta: BigRational) -> Result<Self> {
        let half = BigRational::new(1.into(), 2.into());
        let zero = BigRational::from_integer(0.into());
        if alpha <= zero || alpha >= half {
            return Err(Error::param(format!("need 0 < α < 1/2, got {alpha}")));
        }
        Ok(AccuracyParams { alpha, beta })
    }

    pub fn standard(n: u64) -> Self {
        AccuracyParams {
            alpha: BigRational::new(1.into(), 3.into()),
            beta: BigRational::new(1.into(), BigInt::from(2 * n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(kind: SchemeKind, n: u64, m: u64) -> HardnessInstance {
        let p = SchemeParams::new(kind, 64, n, Some(m)).unwrap();
        make_hardness_instance(&p, &RunSeed::from_master(11)).unwrap()
    }

    fn r(a: u64, b: u64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn answers_are_j_over_n() {
        for (kind, m) in [(SchemeKind::ShortCtext, 32), (SchemeKind::ShortKey, 8)] {
            let h = inst(kind, 5, m);
            for j in 0..=5 {
                let c = h.instance.encrypt(j, &RunSeed::from_master(j)).unwrap();
                assert_eq!(h.dataset.answer(&c).unwrap(), r(j, 5));
            }
        }
    }

    #[test]
    fn removed_row_contributes_nothing() {
        let h = inst(SchemeKind::ShortCtext, 5, 32);
        let d = h.dataset.without(2).unwrap();
        for j in 0..=5u64 {
            let c = h.instance.encrypt(j, &RunSeed::from_master(j)).unwrap();
            let expect = j - u64::from(2 <= j);
            assert_eq!(d.answer(&c).unwrap(), r(expect, 5));
        }
        assert!(h.dataset.without(6).is_err());
    }

    #[test]
    fn restriction_keeps_a_sorted_subset() {
        let mut h = inst(SchemeKind::ShortCtext, 4, 64);
        h.restrict_queries(4, &RunSeed::from_master(1)).unwrap();
        let QueryFamily::Enumerated { ciphertexts } = &h.family else {
            panic!()
        };
        assert_eq!(ciphertexts.len(), 4);
        assert!(ciphertexts.windows(2).all(|w| w[0] < w[1]));
        assert!(h.restrict_queries(5, &RunSeed::from_master(1)).is_err());
    }

    #[test]
    fn accuracy_params_bounds() {
        assert!(AccuracyParams::new(r(1, 2), r(1, 4)).is_err());
        assert!(AccuracyParams::new(r(0, 1), r(1, 4)).is_err());
        assert_eq!(AccuracyParams::standard(4).beta, r(1, 8));
    }
}
