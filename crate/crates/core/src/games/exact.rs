//! Exact rational computations: the XOR-decoder identity and the optimal
//! InputMatching advantage over truly random function tables.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest table count `range^domain` the input-matching enumeration accepts.
pub const MAX_TABLES: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XorIdentity {
    #[serde(serialize_with = "crate::json::ratio")]
    pub q0: BigRational,
    #[serde(serialize_with = "crate::json::ratio")]
    pub q1: BigRational,
    /// `Pr[1 - S(c) = b] - 1/2`.
    #[serde(serialize_with = "crate::json::ratio")]
    pub signed_adv: BigRational,
    #[serde(serialize_with = "crate::json::ratio")]
    pub adv: BigRational,
    /// `Pr[S(c0) ⊕ S(c1) = b0 ⊕ b1] - 1/2`.
    #[serde(serialize_with = "crate::json::ratio")]
    pub two_adv: BigRational,
    pub identity_holds: bool,
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// Enumerates `b` (and `(b0, b1)`) together with the decoder's coin outcomes
/// for the decoder accepting `c ← Enc(i* - b)` with probability `q_b`.
pub fn xor_identity_exact(q0: &BigRational, q1: &BigRational) -> Result<XorIdentity> {
    let unit = BigRational::zero()..=BigRational::one();
    if !unit.contains(q0) || !unit.contains(q1) {
        return Err(Error::param(format!("acceptance probabilities ({q0}, {q1}) not in [0, 1]")));
    }
    let q = [q0.clone(), q1.clone()];
    let pr_s = |b: usize, s: u8| {
        if s == 1 {
            q[b].clone()
        } else {
            BigRational::one() - &q[b]
        }
    };

    let mut single = BigRational::zero();
    for b in 0..2usize {
        for s in 0..2u8 {
            if usize::from(1 - s) == b {
                single += half() * pr_s(b, s);
            }
        }
    }

    let quarter = BigRational::new(1.into(), 4.into());
    let mut pair = BigRational::zero();
    for b0 in 0..2usize {
        for b1 in 0..2usize {
            for s0 in 0..2u8 {
                for s1 in 0..2u8 {
                    if usize::from(s0 ^ s1) == b0 ^ b1 {
                        pair += &quarter * pr_s(b0, s0) * pr_s(b1, s1);
                    }
                }
            }
        }
    }

    let signed_adv = single - half();
    let adv = signed_adv.abs();
    let two_adv = pair - half();
    let identity_holds = two_adv == BigRational::from_integer(2.into()) * &adv * &adv;
    Ok(XorIdentity {
        q0: q0.clone(),
        q1: q1.clone(),
        signed_adv,
        adv,
        two_adv,
        identity_holds,
    })
}

/// `xor_identity_exact` on the exact binary values of two floats.
pub fn xor_identity_f64(q0: f64, q1: f64) -> Result<XorIdentity> {
    let r = |q: f64| {
        BigRational::from_float(q).ok_or_else(|| Error::param(format!("{q} is not a finite probability")))
    };
    xor_identity_exact(&r(q0)?, &r(q1)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputMatchingExact {
    /// Domain size.
    pub m: u64,
    /// Range size.
    pub n: u64,
    pub y0: u64,
    pub y1: u64,
    pub surjective_tables: u64,
    pub distinct_views: u64,
    /// Best possible `Pr[b' = b0 ⊕ b1] - 1/2`.
    #[serde(serialize_with = "crate::json::ratio")]
    pub optimal_advantage: BigRational,
    /// Advantage of guessing `1{x0 ≠ x1}`.
    #[serde(serialize_with = "crate::json::ratio")]
    pub equality_advantage: BigRational,
}

impl InputMatchingExact {
    /// `optimal_advantage / sqrt(n/m)`.
    pub fn envelope_ratio(&self) -> f64 {
        crate::json::to_f64(&self.optimal_advantage) / (self.n as f64 / self.m as f64).sqrt()
    }
}

/// View key: `(x0, x1, table with x0 and x1 masked)`; masked cells hold `n`.
type View = (u64, u64, Vec<u64>);

/// Exact InputMatching with a uniformly random surjective `f : [m] → [n]` in
/// place of the PRF. Sums `max_b Pr[view, b0 ⊕ b1 = b]` over every view.
pub fn exact_input_matching(m: u64, n: u64, y0: u64, y1: u64) -> Result<InputMatchingExact> {
    if n < 2 || y0 == y1 || y0 >= n || y1 >= n {
        return Err(Error::param(format!("targets ({y0}, {y1}) must be distinct points of [{n}]")));
    }
    if m < n {
        return Err(Error::param(format!("no surjection from [{m}] onto [{n}]")));
    }
    let tables = (n as u128).checked_pow(m as u32).filter(|t| *t <= MAX_TABLES as u128);
    let Some(tables) = tables else {
        return Err(Error::Capacity(format!("{n}^{m} function tables exceed {MAX_TABLES}")));
    };

    let mut mass: HashMap<View, [BigRational; 2]> = HashMap::new();
    let mut surjective = 0u64;
    let mut f = vec![0u64; m as usize];
    for code in 0..tables as u64 {
        let mut c = code;
        for v in f.iter_mut() {
            *v = c % n;
            c /= n;
        }
        let mut pre: Vec<Vec<u64>> = vec![Vec::new(); n as usize];
        for (x, &v) in f.iter().enumerate() {
            pre[v as usize].push(x as u64);
        }
        if pre.iter().any(Vec::is_empty) {
            continue;
        }
        surjective += 1;
        let targets = [y0, y1];
        for b0 in 0..2usize {
            for b1 in 0..2usize {
                let (p0, p1) = (&pre[targets[b0] as usize], &pre[targets[b1] as usize]);
                let w = BigRational::new(BigInt::one(), BigInt::from(4 * p0.len() * p1.len()));
                for &x0 in p0 {
                    for &x1 in p1 {
                        let mut masked = f.clone();
                        masked[x0 as usize] = n;
                        masked[x1 as usize] = n;
                        let e = mass
                            .entry((x0, x1, masked))
                            .or_insert_with(|| [BigRational::zero(), BigRational::zero()]);
                        e[b0 ^ b1] += &w;
                    }
                }
            }
        }
    }
    // Each table is equally likely.
    let per_table = BigRational::new(BigInt::one(), BigInt::from(surjective));
    let mut optimal = BigRational::zero();
    let mut equality = BigRational::zero();
    for ((x0, x1, _), p) in &mass {
        optimal += (&p[0]).max(&p[1]);
        equality += &p[usize::from(x0 != x1)];
    }
    Ok(InputMatchingExact {
        m,
        n,
        y0,
        y1,
        surjective_tables: surjective,
        distinct_views: mass.len() as u64,
        optimal_advantage: optimal * &per_table - half(),
        equality_advantage: equality * per_table - half(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputMatchingSweep {
    pub rows: Vec<InputMatchingExact>,
    pub monotone_non_increasing: bool,
    /// Smallest `c` with `optimal_advantage ≤ c·sqrt(n/m)` on every row.
    #[serde(serialize_with = "crate::json::decimal")]
    pub fitted_c: f64,
}

/// `exact_input_matching` for each `m`, targets `0` and `1`.
pub fn input_matching_sweep(n: u64, ms: &[u64]) -> Result<InputMatchingSweep> {
    let rows = ms
        .iter()
        .map(|&m| exact_input_matching(m, n, 0, 1))
        .collect::<Result<Vec<_>>>()?;
    let monotone_non_increasing = rows
        .windows(2)
        .all(|w| w[0].m > w[1].m || w[1].optimal_advantage <= w[0].optimal_advantage);
    let fitted_c = rows.iter().map(InputMatchingExact::envelope_ratio).fold(0.0, f64::max);
    Ok(InputMatchingSweep {
        rows,
        monotone_non_increasing,
        fitted_c,
    })
}
