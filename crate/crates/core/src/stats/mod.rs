//! Exact distributional arithmetic: statistical distance, the order-2 Rényi
//! divergence, almost-pairwise-independence `δ`, and a brute-force check of
//! the conditional hash lemma. Everything is rational; nothing rounds.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::primitives::{PrfKey, PrfRole, PrfShape, RunSeed};

/// Largest number of functions a family may list.
pub const MAX_FAMILY: u64 = 1 << 16;

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// A distribution over an explicit outcome space. Zero-probability outcomes
/// stay in the space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDist<O: Ord> {
    probs: BTreeMap<O, BigRational>,
}

impl<O: Ord + Clone> FiniteDist<O> {
    pub fn new(probs: BTreeMap<O, BigRational>) -> Result<Self> {
        if probs.values().any(Signed::is_negative) {
            return Err(Error::param("negative probability"));
        }
        let total: BigRational = probs.values().sum();
        if !total.is_one() {
            return Err(Error::param(format!("probabilities sum to {total}, not 1")));
        }
        Ok(FiniteDist { probs })
    }

    pub fn uniform(outcomes: impl IntoIterator<Item = O>) -> Result<Self> {
        let mut probs: BTreeMap<O, BigRational> = outcomes.into_iter().map(|o| (o, BigRational::zero())).collect();
        let k = probs.len() as u64;
        if k == 0 {
            return Err(Error::param("empty outcome space"));
        }
        for p in probs.values_mut() {
            *p = ratio(1, k);
        }
        Ok(FiniteDist { probs })
    }

    pub fn prob(&self, o: &O) -> BigRational {
        self.probs.get(o).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&O, &BigRational)> {
        self.probs.iter()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    fn same_space(&self, other: &Self) -> bool {
        self.probs.len() == other.probs.len() && self.probs.keys().eq(other.probs.keys())
    }
}

/// `(1/2) Σ |p - q|`.
pub fn statistical_distance<O: Ord + Clone>(p: &FiniteDist<O>, q: &FiniteDist<O>) -> Result<BigRational> {
    if !p.same_space(q) {
        return Err(Error::param("distributions live on different outcome spaces"));
    }
    let sum: BigRational = p.probs.values().zip(q.probs.values()).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / BigRational::from_integer(2.into()))
}

/// A divergence value that may be infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Divergence {
    Finite(BigRational),
    Infinite,
}

impl Serialize for Divergence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Divergence::Finite(r) => crate::json::ratio(r, s),
            Divergence::Infinite => s.serialize_str("inf"),
        }
    }
}

impl Divergence {
    /// `sqrt(RD - 1)/2`, the statistical-distance bound it implies.
    pub fn sd_bound(&self) -> f64 {
        match self {
            Divergence::Finite(r) => (crate::json::to_f64(r) - 1.0).max(0.0).sqrt() / 2.0,
            Divergence::Infinite => f64::INFINITY,
        }
    }

    /// Exact `sd ≤ sqrt(RD - 1)/2`, compared as `4·sd² ≤ RD - 1`.
    pub fn bounds_sd(&self, sd: &BigRational) -> bool {
        match self {
            Divergence::Finite(r) => BigRational::from_integer(4.into()) * sd * sd <= r - BigRational::one(),
            Divergence::Infinite => true,
        }
    }
}

/// `RD(p, q) = Σ q(h)² / p(h)`; infinite when `q` puts mass where `p` has none.
pub fn renyi_divergence<O: Ord + Clone>(p: &FiniteDist<O>, q: &FiniteDist<O>) -> Result<Divergence> {
    if !p.same_space(q) {
        return Err(Error::param("distributions live on different outcome spaces"));
    }
    let mut total = BigRational::zero();
    for (a, b) in p.probs.values().zip(q.probs.values()) {
        if b.is_zero() {
            continue;
        }
        if a.is_zero() {
            return Ok(Divergence::Infinite);
        }
        total += b * b / a;
    }
    Ok(Divergence::Finite(total))
}

/// A weighted list of functions `[T] → [K]`, each given by its value table.
/// Identical tables are merged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HashFamily {
    pub t: u64,
    pub k: u64,
    pub description: String,
    #[serde(skip)]
    pub dist: FiniteDist<Vec<u64>>,
    #[serde(skip)]
    delta: OnceLock<BigRational>,
}

impl HashFamily {
    pub fn new(t: u64, k: u64, description: String, tables: Vec<(Vec<u64>, BigRational)>) -> Result<Self> {
        if t == 0 || k == 0 {
            return Err(Error::param("need T ≥ 1 and K ≥ 1"));
        }
        if tables.iter().any(|(f, _)| f.len() as u64 != t || f.iter().any(|&v| v >= k)) {
            return Err(Error::param(format!("every table must map [{t}] into [{k}]")));
        }
        let mut probs: BTreeMap<Vec<u64>, BigRational> = BTreeMap::new();
        for (f, w) in tables {
            *probs.entry(f).or_insert_with(BigRational::zero) += w;
        }
        Ok(HashFamily {
            t,
            k,
            description,
            dist: FiniteDist::new(probs)?,
            delta: OnceLock::new(),
        })
    }

    /// All `K^T` functions, uniformly.
    pub fn all_functions(t: u64, k: u64) -> Result<Self> {
        let count = (k as u128).checked_pow(t as u32).filter(|c| *c <= MAX_FAMILY as u128);
        let Some(count) = count else {
            return Err(Error::Capacity(format!("{k}^{t} functions exceed {MAX_FAMILY}")));
        };
        let w = ratio(1, count as u64);
        let tables = (0..count as u64)
            .map(|code| {
                let mut c = code;
                let f = (0..t)
                    .map(|_| {
                        let v = c % k;
                        c /= k;
                        v
                    })
                    .collect();
                (f, w.clone())
            })
            .collect();
        HashFamily::new(t, k, format!("all functions [{t}] -> [{k}]"), tables)
    }

    /// The `K` constant functions, uniformly.
    pub fn constant_functions(t: u64, k: u64) -> Result<Self> {
        let tables = (0..k).map(|v| (vec![v; t as usize], ratio(1, k))).collect();
        HashFamily::new(t, k, format!("constant functions [{t}] -> [{k}]"), tables)
    }

    /// GGM PRFs `[T] → [K]` keyed by `seed.derive(j)` for `j < seeds`,
    /// uniformly over that seed list.
    pub fn ggm(t: u64, k: u64, lambda_bits: u32, seeds: u64, seed: &RunSeed) -> Result<Self> {
        if seeds == 0 || seeds > MAX_FAMILY {
            return Err(Error::Capacity(format!("seed list of {seeds} outside 1..={MAX_FAMILY}")));
        }
        let shape = PrfShape::index(lambda_bits, t, k, PrfRole::Generic)?;
        let w = ratio(1, seeds);
        let tables = (0..seeds)
            .map(|j| Ok((PrfKey::random(shape, &seed.derive(j)).evaluate_all()?, w.clone())))
            .collect::<Result<Vec<_>>>()?;
        HashFamily::new(
            t,
            k,
            format!("GGM [{t}] -> [{k}], lambda {lambda_bits}, {seeds} seeds"),
            tables,
        )
    }

    /// Explicit tables, uniformly weighted.
    pub fn from_tables(t: u64, k: u64, tables: Vec<Vec<u64>>) -> Result<Self> {
        let count = tables.len() as u64;
        if count == 0 || count > MAX_FAMILY {
            return Err(Error::Capacity(format!("{count} tables outside 1..={MAX_FAMILY}")));
        }
        let w = ratio(1, count);
        HashFamily::new(
            t,
            k,
            format!("{count} listed tables"),
            tables.into_iter().map(|f| (f, w.clone())).collect(),
        )
    }

    /// `Pr[h(x) = y]`.
    pub fn marginal(&self, x: u64, y: u64) -> BigRational {
        self.dist
            .iter()
            .filter(|(f, _)| f[x as usize] == y)
            .map(|(_, w)| w.clone())
            .sum()
    }
}

/// `max |Pr[h(x0) = y0 ∧ h(x1) = y1] - 1/K²|` over distinct `x0, x1` and all
/// `y0, y1`. Cached on the family.
pub fn pairwise_delta(family: &HashFamily) -> BigRational {
    family.delta.get_or_init(|| compute_delta(family)).clone()
}

fn compute_delta(family: &HashFamily) -> BigRational {
    let (t, k) = (family.t as usize, family.k as usize);
    let base = ratio(1, family.k * family.k);
    let mut delta = BigRational::zero();
    for x0 in 0..t {
        for x1 in 0..t {
            if x0 == x1 {
                continue;
            }
            let mut joint = vec![BigRational::zero(); k * k];
            for (f, w) in family.dist.iter() {
                joint[f[x0] as usize * k + f[x1] as usize] += w;
            }
            for p in &joint {
                let d = (p - &base).abs();
                if d > delta {
                    delta = d;
                }
            }
        }
    }
    delta
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub t: u64,
    pub k: u64,
    pub family: String,
    pub target: Vec<u64>,
    pub y: u64,
    /// Points of `M` where `h(x) = y` is impossible; left out of `D₂`.
    pub excluded: Vec<u64>,
    /// `|M|` after exclusions.
    pub m: u64,
    #[serde(serialize_with = "crate::json::ratio")]
    pub delta: BigRational,
    #[serde(serialize_with = "crate::json::ratio")]
    pub sd: BigRational,
    pub rd: Divergence,
    /// `K/m + 7K²δ`; the lemma's bound is half its square root.
    #[serde(serialize_with = "crate::json::ratio")]
    pub statement_radicand: BigRational,
    #[serde(serialize_with = "crate::json::decimal")]
    pub statement_bound: f64,
    /// `1 + (K-1)/m + 7K²δ`.
    #[serde(serialize_with = "crate::json::ratio")]
    pub rd_bound: BigRational,
    /// `SD ≤ (1/2)·sqrt(K/m + 7K²δ)`.
    pub statement_holds: bool,
    /// `RD ≤ 1 + (K-1)/m + 7K²δ`.
    pub rd_bound_holds: bool,
    /// `SD ≤ (1/2)·sqrt((K-1)/m + 7K²δ)`.
    pub proof_form_holds: bool,
    /// `SD ≤ sqrt(RD - 1)/2`.
    pub sd_rd_consistent: bool,
    pub pass: bool,
}

/// Builds `D₁` (a uniform family draw) and `D₂` (uniform `x ∈ M`, then the
/// family conditioned on `h(x) = y`) exactly and checks every bound.
pub fn verify_conditional_hash_lemma(family: &HashFamily, target: &[u64], y: u64) -> Result<LemmaReport> {
    let mut target = target.to_vec();
    target.sort_unstable();
    target.dedup();
    if target.is_empty() || target.iter().any(|&x| x >= family.t) {
        return Err(Error::param(format!("M must be a nonempty subset of [{}]", family.t)));
    }
    if y >= family.k {
        return Err(Error::param(format!("y = {y} outside [{}]", family.k)));
    }
    let (live, excluded): (Vec<_>, Vec<_>) = target
        .iter()
        .map(|&x| (x, family.marginal(x, y)))
        .partition(|(_, p)| !p.is_zero());
    if live.is_empty() {
        return Err(Error::param("h(x) = y is impossible for every x in M"));
    }
    let m = live.len() as u64;
    let inv: Vec<(usize, BigRational)> = live.iter().map(|(x, p)| (*x as usize, p.recip())).collect();
    let per_point = ratio(1, m);

    let mut d2 = BTreeMap::new();
    for (f, w) in family.dist.iter() {
        let mut acc = BigRational::zero();
        for (x, ip) in &inv {
            if f[*x] == y {
                acc += ip;
            }
        }
        d2.insert(f.clone(), acc * w * &per_point);
    }
    let d2 = FiniteDist::new(d2)?;
    let sd = statistical_distance(&family.dist, &d2)?;
    let rd = renyi_divergence(&family.dist, &d2)?;

    let delta = pairwise_delta(family);
    let k = BigRational::from_integer(family.k.into());
    let noise = BigRational::from_integer(7.into()) * &k * &k * &delta;
    let statement_radicand = &k / BigRational::from_integer(m.into()) + &noise;
    let proof_radicand = (&k - BigRational::one()) / BigRational::from_integer(m.into()) + &noise;
    let four_sd_sq = BigRational::from_integer(4.into()) * &sd * &sd;
    let rd_bound = BigRational::one() + &proof_radicand;

    let statement_holds = four_sd_sq <= statement_radicand;
    let proof_form_holds = four_sd_sq <= proof_radicand;
    let rd_bound_holds = match &rd {
        Divergence::Finite(r) => *r <= rd_bound,
        Divergence::Infinite => false,
    };
    let sd_rd_consistent = rd.bounds_sd(&sd);
    Ok(LemmaReport {
        t: family.t,
        k: family.k,
        family: family.description.clone(),
        target,
        y,
        excluded: excluded.into_iter().map(|(x, _)| x).collect(),
        m,
        statement_bound: crate::json::to_f64(&statement_radicand).sqrt() / 2.0,
        statement_radicand,
        rd_bound,
        delta,
        sd,
        rd,
        statement_holds,
        rd_bound_holds,
        proof_form_holds,
        sd_rd_consistent,
        pass: statement_holds && rd_bound_holds && proof_form_holds && sd_rd_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_instance() {
        let fam = HashFamily::all_functions(2, 2).unwrap();
        let r = verify_conditional_hash_lemma(&fam, &[0, 1], 1).unwrap();
        assert_eq!(r.sd, ratio(1, 4));
        assert_eq!(r.rd, Divergence::Finite(ratio(3, 2)));
        assert!((r.rd.sd_bound() - 0.5f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(r.pass);
    }

    #[test]
    fn identical_and_disjoint() {
        let p = FiniteDist::uniform([1u8, 2, 3]).unwrap();
        assert_eq!(statistical_distance(&p, &p).unwrap(), BigRational::zero());
        assert_eq!(renyi_divergence(&p, &p).unwrap(), Divergence::Finite(BigRational::one()));
        let a = FiniteDist::new([(0u8, BigRational::one()), (1, BigRational::zero())].into()).unwrap();
        let b = FiniteDist::new([(0u8, BigRational::zero()), (1, BigRational::one())].into()).unwrap();
        assert_eq!(statistical_distance(&a, &b).unwrap(), BigRational::one());
        assert_eq!(renyi_divergence(&a, &b).unwrap(), Divergence::Infinite);
    }

    #[test]
    fn mismatched_spaces() {
        let p = FiniteDist::uniform([1u8, 2]).unwrap();
        let q = FiniteDist::uniform([1u8, 3]).unwrap();
        assert!(statistical_distance(&p, &q).is_err());
        assert!(FiniteDist::new([(0u8, ratio(1, 3))].into()).is_err());
    }

    #[test]
    fn deltas() {
        assert_eq!(pairwise_delta(&HashFamily::all_functions(4, 3).unwrap()), BigRational::zero());
        assert_eq!(pairwise_delta(&HashFamily::constant_functions(4, 2).unwrap()), ratio(1, 4));
    }

    #[test]
    fn single_point_is_vacuous_for_large_k() {
        let fam = HashFamily::all_functions(3, 4).unwrap();
        let r = verify_conditional_hash_lemma(&fam, &[1], 2).unwrap();
        assert!(r.statement_bound >= 1.0);
        assert!(r.pass);
    }

    #[test]
    fn impossible_points_are_excluded() {
        let fam = HashFamily::from_tables(3, 2, vec![vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        let r = verify_conditional_hash_lemma(&fam, &[0, 1, 2], 1).unwrap();
        assert_eq!(r.excluded, vec![0]);
        assert_eq!(r.m, 2);
        assert!(verify_conditional_hash_lemma(&fam, &[0], 1).is_err());
    }
}
