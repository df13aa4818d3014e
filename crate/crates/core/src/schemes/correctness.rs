//! Exhaustive correctness check: `Dec(sk_i, c) = 1{i ≤ j}` for every user and
//! every index a ciphertext can carry.

use rayon::prelude::*;
use serde::Serialize;

use super::{decrypt, setup, Ciphertext, Instance, SchemeKind, SchemeParams};
use crate::error::{Error, Result};
use crate::obf::Output;
use crate::primitives::RunSeed;

/// Above this many ciphertexts the short-ctext check samples per index by default.
pub const EXHAUSTIVE_CIPHERTEXT_LIMIT: u64 = 1 << 16;

/// Which ciphertexts are decrypted for each index `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", content = "per_index", rename_all = "kebab-case")]
pub enum Coverage {
    /// Every preimage of `j` (short-ctext only).
    Exhaustive,
    /// This many fresh encryptions to `j`.
    Sampled(u64),
}

impl Coverage {
    /// Exhaustive for short-ctext when `m` fits the limit, otherwise `per_index` samples.
    pub fn default_for(params: &SchemeParams, per_index: u64) -> Self {
        match params.scheme {
            SchemeKind::ShortCtext if params.m <= EXHAUSTIVE_CIPHERTEXT_LIMIT => Coverage::Exhaustive,
            _ => Coverage::Sampled(per_index),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrectnessFailure {
    pub setup: u64,
    pub i: u64,
    pub j: u64,
    pub ciphertext: Ciphertext,
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrectnessReport {
    pub params: SchemeParams,
    pub setups: u64,
    pub coverage: Coverage,
    /// Decryptions performed.
    pub checks: u64,
    pub failures: u64,
    /// Up to ten failures, in setup order.
    pub examples: Vec<CorrectnessFailure>,
}

impl CorrectnessReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

struct SetupOutcome {
    checks: u64,
    failures: Vec<CorrectnessFailure>,
}

fn ciphertexts(inst: &Instance, coverage: Coverage, seed: &RunSeed) -> Result<Vec<(u64, Ciphertext)>> {
    let n = inst.n();
    match (coverage, inst) {
        (Coverage::Exhaustive, Instance::ShortCtext(sys)) => Ok(sys
            .master
            .preimage_table
            .iter()
            .enumerate()
            .flat_map(|(j, cs)| cs.iter().map(move |&c| (j as u64, Ciphertext::ShortCtext(c))))
            .collect()),
        (Coverage::Exhaustive, Instance::ShortKey(_)) => Err(Error::param(
            "short-key ciphertexts are programs and cannot be enumerated; use sampled coverage",
        )),
        (Coverage::Sampled(k), _) => {
            let mut out = Vec::with_capacity(((n + 1) * k) as usize);
            for j in 0..=n {
                for t in 0..k {
                    out.push((j, inst.encrypt(j, &seed.derive(j).derive(t))?));
                }
            }
            Ok(out)
        }
    }
}

fn check_one(params: &SchemeParams, coverage: Coverage, s: u64, seed: &RunSeed) -> Result<SetupOutcome> {
    let inst = setup(params, &seed.derive("setup"))?;
    let cts = ciphertexts(&inst, coverage, &seed.derive("encrypt"))?;
    let users = inst.users();
    let mut checks = 0;
    let mut failures = Vec::new();
    for (j, c) in cts {
        for key in &users {
            let i = key.index();
            let output = decrypt(key, &c)?;
            checks += 1;
            if output != Output::bit(i <= j) {
                failures.push(CorrectnessFailure {
                    setup: s,
                    i,
                    j,
                    ciphertext: c.clone(),
                    output,
                });
            }
        }
    }
    Ok(SetupOutcome { checks, failures })
}

/// Runs `setups` independent setups (seeds `seed.derive(s)`) and decrypts the
/// covered ciphertexts with every key.
pub fn check_correctness(
    params: &SchemeParams,
    setups: u64,
    coverage: Coverage,
    seed: &RunSeed,
) -> Result<CorrectnessReport> {
    let outcomes = (0..setups)
        .into_par_iter()
        .map(|s| check_one(params, coverage, s, &seed.derive(s)))
        .collect::<Result<Vec<_>>>()?;
    let checks = outcomes.iter().map(|o| o.checks).sum();
    let failures = outcomes.iter().map(|o| o.failures.len() as u64).sum();
    let examples = outcomes.into_iter().flat_map(|o| o.failures).take(10).collect();
    Ok(CorrectnessReport {
        params: params.clone(),
        setups,
        coverage,
        checks,
        failures,
        examples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preimage_is_checked() {
        let p = SchemeParams::new(SchemeKind::ShortCtext, 64, 3, Some(20)).unwrap();
        let r = check_correctness(&p, 2, Coverage::Exhaustive, &RunSeed::from_master(1)).unwrap();
        assert_eq!(r.checks, 2 * 20 * 3);
        assert!(r.pass());
    }

    #[test]
    fn short_key_is_sampled() {
        let p = SchemeParams::new(SchemeKind::ShortKey, 64, 3, Some(8)).unwrap();
        assert_eq!(Coverage::default_for(&p, 5), Coverage::Sampled(5));
        let r = check_correctness(&p, 2, Coverage::Sampled(5), &RunSeed::from_master(1)).unwrap();
        assert_eq!(r.checks, 2 * 4 * 5 * 3);
        assert!(r.pass());
        assert!(check_correctness(&p, 1, Coverage::Exhaustive, &RunSeed::from_master(1)).is_err());
    }
}
