//! Checks every functional step of both hybrid chains with the equivalence checker.

use serde::Serialize;

use super::short_ctext::{self, build_hybrid_sc, ScChallenge, ScSystem, XStar};
use super::short_key::{build_hybrid_sk, SkSystem};
use super::{setup, Instance, SchemeParams};
use crate::error::{Error, Result};
use crate::obf::{programs_equivalent, Counterexample, InputSpace, ProgramDescriptor, MAX_INPUTS};
use crate::primitives::RunSeed;

/// Random secrets added to the user secrets when the full space is too big.
const EXTRA_SECRETS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Equivalent,
    Different,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HybridStep {
    pub left: String,
    pub right: String,
    pub i_star: u64,
    pub bits: (u8, u8),
    pub expected: Expectation,
    pub equivalent: bool,
    /// Whether `s` ranged over every value or only listed candidates.
    pub space: String,
    pub space_size: u64,
    pub counterexample: Option<Counterexample>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridReport {
    pub params: SchemeParams,
    pub steps: Vec<HybridStep>,
    pub failures: u64,
}

impl HybridReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

fn sc_space(sys: &ScSystem, sig_of: &ProgramDescriptor, seed: &RunSeed) -> Result<(InputSpace, String)> {
    let sig = sig_of.signature()?;
    let full = InputSpace::full(&sig);
    if full.size() <= MAX_INPUTS {
        return Ok((full, "full".into()));
    }
    let bytes = sys.params.lambda_bits as usize / 16;
    let mut secrets: Vec<Vec<u8>> = sys.users.iter().map(|k| k.s.0.clone()).collect();
    secrets.extend((0..EXTRA_SECRETS).map(|t| seed.derive(t).bytes(bytes)));
    Ok((InputSpace::sc_listed(&sig, secrets), format!("user secrets + {EXTRA_SECRETS} random")))
}

struct Pair<'a> {
    left: (&'a str, &'a ProgramDescriptor),
    right: (&'a str, &'a ProgramDescriptor),
    i_star: u64,
    bits: (u8, u8),
    expected: Expectation,
}

fn judge(pair: Pair<'_>, space: &InputSpace, space_name: &str) -> Result<HybridStep> {
    let (a, b) = (pair.left.1, pair.right.1);
    let eq = programs_equivalent(a, b, space)?;
    let holds = match pair.expected {
        Expectation::Equivalent => eq.equivalent,
        // The witness must replay and actually disagree.
        Expectation::Different => match &eq.counterexample {
            Some(cx) => {
                a.evaluate(&cx.input)? == cx.left && b.evaluate(&cx.input)? == cx.right && cx.left != cx.right
            }
            None => false,
        },
    };
    Ok(HybridStep {
        left: pair.left.0.into(),
        right: pair.right.0.into(),
        i_star: pair.i_star,
        bits: pair.bits,
        expected: pair.expected,
        equivalent: eq.equivalent,
        space: space_name.into(),
        space_size: eq.space_size,
        counterexample: eq.counterexample,
        holds,
    })
}

fn sc_steps(sys: &ScSystem, i_star: u64, seed: &RunSeed) -> Result<Vec<HybridStep>> {
    let level = |l, ch| build_hybrid_sc(l, sys, i_star, ch, XStar::Honest, seed);
    let (p0, p1, p2) = (level(0, None)?, level(1, None)?, level(2, None)?);
    let (space, name) = sc_space(sys, &p0, &seed.derive("secrets"))?;
    let mut steps = vec![
        judge(
            Pair { left: ("P", &p0), right: ("P1", &p1), i_star, bits: (0, 0), expected: Expectation::Equivalent },
            &space,
            &name,
        )?,
        judge(
            Pair { left: ("P", &p0), right: ("P2", &p2), i_star, bits: (0, 0), expected: Expectation::Different },
            &space,
            &name,
        )?,
    ];
    for (b0, b1) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
        let cs = seed.derive("challenge").derive(u64::from(2 * b0 + b1));
        let ch = ScChallenge {
            c0: short_ctext::encrypt(&sys.master, i_star - u64::from(b0), &cs.derive(0u64))?,
            b0,
            c1: short_ctext::encrypt(&sys.master, i_star - u64::from(b1), &cs.derive(1u64))?,
            b1,
        };
        let (p3, p4) = (level(3, Some(ch))?, level(4, Some(ch))?);
        let bits = (b0, b1);
        steps.push(judge(
            Pair { left: ("P2", &p2), right: ("P3", &p3), i_star, bits, expected: Expectation::Equivalent },
            &space,
            &name,
        )?);
        steps.push(judge(
            Pair { left: ("P3", &p3), right: ("P4", &p4), i_star, bits, expected: Expectation::Equivalent },
            &space,
            &name,
        )?);
    }
    Ok(steps)
}

const SK_NAMES: [&str; 6] = ["P", "P1", "P2", "P3", "P4", "P5"];

fn sk_steps(sys: &SkSystem, i_star: u64, seed: &RunSeed) -> Result<Vec<HybridStep>> {
    let mut steps = Vec::new();
    for b0 in 0..2u8 {
        let bs = seed.derive(u64::from(b0));
        let ct = |l| build_hybrid_sk(l, &sys.master, i_star, b0, None, &bs).map(|(c, _)| c);
        let descs = (0..=5)
            .map(|l| {
                ct(l)?
                    .program
                    .transparent_payload()
                    .cloned()
                    .ok_or_else(|| Error::Configuration("hybrid checks need the transparent backend".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let space = InputSpace::full(&descs[0].signature()?);
        for (l, r) in [(0usize, 1usize), (2, 3), (4, 5)] {
            steps.push(judge(
                Pair {
                    left: (SK_NAMES[l], &descs[l]),
                    right: (SK_NAMES[r], &descs[r]),
                    i_star,
                    bits: (b0, 0),
                    expected: Expectation::Equivalent,
                },
                &space,
                "full",
            )?);
        }
        let (c6, c6_flipped) = (ct(6)?, build_hybrid_sk(6, &sys.master, i_star, 1 - b0, None, &bs)?.0);
        let same = c6 == c6_flipped;
        steps.push(HybridStep {
            left: "Enc6(b0)".into(),
            right: "Enc6(1-b0)".into(),
            i_star,
            bits: (b0, 1 - b0),
            expected: Expectation::Equivalent,
            equivalent: same,
            space: "ciphertext bytes".into(),
            space_size: 1,
            counterexample: None,
            holds: same,
        });
    }
    Ok(steps)
}

/// Runs both chains' functional steps for `i_star`, or for every index when `None`.
pub fn check_hybrids(params: &SchemeParams, i_star: Option<u64>, seed: &RunSeed) -> Result<HybridReport> {
    let inst = setup(params, &seed.derive("setup"))?;
    let targets: Vec<u64> = match i_star {
        Some(i) if i == 0 || i > params.n => return Err(Error::param(format!("i* = {i} out of 1..={}", params.n))),
        Some(i) => vec![i],
        None => (1..=params.n).collect(),
    };
    let mut steps = Vec::new();
    for i in targets {
        let s = seed.derive("hybrids").derive(i);
        steps.extend(match &inst {
            Instance::ShortCtext(sys) => sc_steps(sys, i, &s)?,
            Instance::ShortKey(sys) => sk_steps(sys, i, &s)?,
        });
    }
    let failures = steps.iter().filter(|s| !s.holds).count() as u64;
    Ok(HybridReport {
        params: params.clone(),
        steps,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::SchemeKind;

    #[test]
    fn small_chains_hold() {
        for kind in [SchemeKind::ShortCtext, SchemeKind::ShortKey] {
            let p = SchemeParams::new(kind, 16, 3, Some(8)).unwrap();
            let r = check_hybrids(&p, None, &RunSeed::from_master(4)).unwrap();
            assert!(r.pass(), "{kind}: {:?}", r.steps.iter().find(|s| !s.holds));
            let per_index = if kind == SchemeKind::ShortCtext { 10 } else { 8 };
            assert_eq!(r.steps.len(), 3 * per_index);
        }
    }

    #[test]
    fn wide_secrets_fall_back_to_a_list() {
        let p = SchemeParams::new(SchemeKind::ShortCtext, 64, 2, Some(8)).unwrap();
        let r = check_hybrids(&p, Some(1), &RunSeed::from_master(0)).unwrap();
        assert!(r.pass());
        assert!(r.steps[0].space.starts_with("user secrets"));
    }
}
