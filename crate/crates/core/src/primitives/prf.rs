//! GGM-tree PRFs over polynomial-size domains, with one- and two-point puncturing.
//!
//! A domain index `x` is written with `depth = ceil(log2(domain))` bits,
//! most significant bit first; bit `b` at a node selects the left (0) or right (1)
//! half of the doubled node seed. The λ-bit leaf is then mapped to the codomain:
//!
//! * `Codomain::Index(r)`: rejection sampling over `ceil(log2 r)`-bit chunks of a
//!   leaf-keyed stream; exactly uniform on `[r]` for a uniform leaf stream.
//! * `Codomain::Bits(k)`: the first `k` bits of a leaf-keyed stream.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::prg::{check_lambda, double};
use super::{xof, Bytes, RunSeed};
use crate::error::{Error, Result};

const RANGE_TAG: &[u8] = b"weak-tt/prf/range";
const BITS_TAG: &[u8] = b"weak-tt/prf/bits";

/// Default attempt budget for the rejection samplers.
pub const DEFAULT_REJECTION_BUDGET: u64 = 10_000;

/// Output space of a PRF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Codomain {
    /// `[r] = {0, …, r-1}`.
    Index(u64),
    /// Bit strings of the given length (a multiple of 8).
    Bits(u32),
}

impl Serialize for Codomain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Codomain::Index(r) => s.serialize_u64(*r),
            Codomain::Bits(k) => s.serialize_str(&format!("bits:{k}")),
        }
    }
}

impl<'de> Deserialize<'de> for Codomain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Codomain;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive integer or \"bits:<k>\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Codomain, E> {
                Ok(Codomain::Index(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Codomain, E> {
                v.strip_prefix("bits:")
                    .and_then(|k| k.parse().ok())
                    .map(Codomain::Bits)
                    .ok_or_else(|| E::custom(format!("bad codomain {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrfRole {
    SkShortctext,
    EncShortctext,
    SkShortkey,
    EncShortkey,
    Generic,
}

/// Parameters shared by full and punctured keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrfShape {
    pub lambda_bits: u32,
    pub domain: u64,
    pub codomain: Codomain,
    pub role: PrfRole,
}

impl PrfShape {
    pub fn new(lambda_bits: u32, domain: u64, codomain: Codomain, role: PrfRole) -> Result<Self> {
        check_lambda(lambda_bits)?;
        if domain == 0 {
            return Err(Error::param("PRF domain must be nonempty"));
        }
        match codomain {
            Codomain::Index(0) => return Err(Error::param("PRF range must be nonempty")),
            Codomain::Bits(k) if k == 0 || k % 8 != 0 => {
                return Err(Error::param(format!("bit codomain must be a positive multiple of 8, got {k}")))
            }
            _ => {}
        }
        Ok(PrfShape {
            lambda_bits,
            domain,
            codomain,
            role,
        })
    }

    pub fn index(lambda_bits: u32, domain: u64, range: u64, role: PrfRole) -> Result<Self> {
        Self::new(lambda_bits, domain, Codomain::Index(range), role)
    }

    pub fn depth(&self) -> u32 {
        tree_depth(self.domain)
    }

    fn check_point(&self, x: u64) -> Result<()> {
        if x >= self.domain {
            return Err(Error::param(format!(
                "domain point {x} out of range [0, {})",
                self.domain
            )));
        }
        Ok(())
    }

    fn range(&self) -> Result<u64> {
        match self.codomain {
            Codomain::Index(r) => Ok(r),
            Codomain::Bits(_) => Err(Error::param("PRF has a bit-string codomain, not an index range")),
        }
    }
}

pub(crate) fn tree_depth(domain: u64) -> u32 {
    if domain <= 1 {
        0
    } else {
        64 - (domain - 1).leading_zeros()
    }
}

/// `ceil(log2(r))`, the chunk width for range `r`.
pub(crate) fn chunk_width(range: u64) -> u32 {
    tree_depth(range)
}

/// Accepts a `chunk_width(range)`-bit chunk iff it already lies in `[range]`.
pub fn accept_chunk(chunk: u64, range: u64) -> Option<u64> {
    (chunk < range).then_some(chunk)
}

fn leaf_to_index(leaf: &[u8], range: u64) -> u64 {
    if range == 1 {
        return 0;
    }
    let width = chunk_width(range);
    let mut stream = xof::Stream::new(RANGE_TAG, leaf);
    loop {
        if let Some(v) = accept_chunk(stream.next_chunk(width), range) {
            return v;
        }
    }
}

fn leaf_to_bits(leaf: &[u8], bits: u32) -> Vec<u8> {
    xof::expand(BITS_TAG, leaf, (bits / 8) as usize)
}

fn child(seed: &[u8], bit: u64) -> Vec<u8> {
    let d = double(seed);
    let half = seed.len();
    if bit == 0 {
        d[..half].to_vec()
    } else {
        d[half..].to_vec()
    }
}

/// Walks from a node at `level` (holding the top `level` bits of `x`) down to the leaf.
fn descend(mut seed: Vec<u8>, x: u64, level: u32, depth: u32) -> Vec<u8> {
    for l in level..depth {
        let bit = (x >> (depth - 1 - l)) & 1;
        seed = child(&seed, bit);
    }
    seed
}

/// A PRF value: either an index or a bit string, depending on the codomain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrfValue {
    Index(u64),
    Bits(Vec<u8>),
}

fn map_leaf(shape: &PrfShape, leaf: &[u8]) -> PrfValue {
    match shape.codomain {
        Codomain::Index(r) => PrfValue::Index(leaf_to_index(leaf, r)),
        Codomain::Bits(k) => PrfValue::Bits(leaf_to_bits(leaf, k)),
    }
}

/// Full PRF key: the GGM root seed plus its shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrfKey {
    shape: PrfShape,
    root_seed: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct PrfKeyJson {
    lambda: u32,
    domain: u64,
    range: Codomain,
    root_seed: Bytes,
    role: PrfRole,
}

impl Serialize for PrfKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PrfKeyJson {
            lambda: self.shape.lambda_bits,
            domain: self.shape.domain,
            range: self.shape.codomain,
            root_seed: Bytes(self.root_seed.clone()),
            role: self.shape.role,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrfKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PrfKeyJson::deserialize(d)?;
        let shape =
            PrfShape::new(j.lambda, j.domain, j.range, j.role).map_err(de::Error::custom)?;
        PrfKey::from_root(shape, j.root_seed.0).map_err(de::Error::custom)
    }
}

impl PrfKey {
    pub fn from_root(shape: PrfShape, root_seed: Vec<u8>) -> Result<Self> {
        if root_seed.len() * 8 != shape.lambda_bits as usize {
            return Err(Error::param(format!(
                "root seed has {} bits, lambda is {}",
                root_seed.len() * 8,
                shape.lambda_bits
            )));
        }
        Ok(PrfKey { shape, root_seed })
    }

    /// Fresh key with a root seed drawn from `seed`.
    pub fn random(shape: PrfShape, seed: &RunSeed) -> Self {
        let root_seed = seed.bytes(shape.lambda_bits as usize / 8);
        PrfKey { shape, root_seed }
    }

    pub fn shape(&self) -> &PrfShape {
        &self.shape
    }

    pub fn domain(&self) -> u64 {
        self.shape.domain
    }

    pub fn root_seed(&self) -> &[u8] {
        &self.root_seed
    }

    /// Index range size; errors for bit-string codomains.
    pub fn range(&self) -> Result<u64> {
        self.shape.range()
    }

    fn leaf(&self, x: u64) -> Vec<u8> {
        descend(self.root_seed.clone(), x, 0, self.shape.depth())
    }

    pub fn eval_value(&self, x: u64) -> Result<PrfValue> {
        self.shape.check_point(x)?;
        Ok(map_leaf(&self.shape, &self.leaf(x)))
    }

    /// `prf_eval`: the range index at `x`.
    pub fn eval(&self, x: u64) -> Result<u64> {
        let r = self.range()?;
        self.shape.check_point(x)?;
        Ok(leaf_to_index(&self.leaf(x), r))
    }

    /// Bit-string output at `x`; errors for index codomains.
    pub fn eval_bits(&self, x: u64) -> Result<Vec<u8>> {
        match self.eval_value(x)? {
            PrfValue::Bits(b) => Ok(b),
            PrfValue::Index(_) => Err(Error::param("PRF has an index codomain, not bit strings")),
        }
    }

    /// Evaluation table over the whole domain.
    pub fn evaluate_all(&self) -> Result<Vec<u64>> {
        let r = self.range()?;
        Ok((0..self.shape.domain)
            .map(|x| leaf_to_index(&self.leaf(x), r))
            .collect())
    }

    /// `preimages[y]` lists every `x` with `PRF(x) = y`, ascending.
    pub fn preimage_table(&self) -> Result<Vec<Vec<u64>>> {
        let r = self.range()?;
        let mut table = vec![Vec::new(); r as usize];
        for (x, y) in self.evaluate_all()?.into_iter().enumerate() {
            table[y as usize].push(x as u64);
        }
        Ok(table)
    }

    /// `prf_puncture`: key that agrees off `points` and returns ⊥ on them.
    pub fn puncture(&self, points: &[u64]) -> Result<PuncturedPrfKey> {
        if points.is_empty() || points.len() > 2 {
            return Err(Error::param(format!(
                "can puncture at 1 or 2 points, got {}",
                points.len()
            )));
        }
        for &p in points {
            self.shape.check_point(p)?;
        }
        let set: BTreeSet<u64> = points.iter().copied().collect();
        if set.len() != points.len() {
            return Err(Error::param("puncture points must be distinct"));
        }

        let depth = self.shape.depth();
        // Seeds of every on-path node, level by level.
        let mut on_path: Vec<(u64, Vec<u8>)> = vec![(0, self.root_seed.clone())];
        let mut copath = Vec::new();
        for level in 1..=depth {
            let mut next = Vec::new();
            for (prefix, seed) in &on_path {
                let d = double(seed);
                let half = seed.len();
                for bit in 0..2u64 {
                    let child_prefix = (prefix << 1) | bit;
                    let child_seed = if bit == 0 { &d[..half] } else { &d[half..] };
                    let is_on_path = set.iter().any(|&p| p >> (depth - level) == child_prefix);
                    if is_on_path {
                        next.push((child_prefix, child_seed.to_vec()));
                    } else {
                        copath.push(CopathEntry {
                            level,
                            prefix: child_prefix,
                            seed: child_seed.to_vec(),
                        });
                    }
                }
            }
            on_path = next;
        }
        copath.sort_by_key(|e| (e.level, e.prefix));
        Ok(PuncturedPrfKey {
            shape: self.shape,
            copath,
            punctured: set.into_iter().collect(),
        })
    }
}

/// A sibling seed hanging off the punctured paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CopathEntry {
    /// Depth of the node; its prefix has exactly this many bits.
    pub level: u32,
    pub prefix: u64,
    pub seed: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct CopathJson {
    level: u32,
    prefix: String,
    seed: Bytes,
}

/// A GGM key punctured at one or two domain points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PuncturedPrfKey {
    shape: PrfShape,
    copath: Vec<CopathEntry>,
    punctured: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct PuncturedJson {
    lambda: u32,
    domain: u64,
    range: Codomain,
    role: PrfRole,
    copath: Vec<CopathJson>,
    punctured: Vec<u64>,
}

fn prefix_string(prefix: u64, level: u32) -> String {
    (0..level)
        .map(|l| if (prefix >> (level - 1 - l)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl Serialize for PuncturedPrfKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PuncturedJson {
            lambda: self.shape.lambda_bits,
            domain: self.shape.domain,
            range: self.shape.codomain,
            role: self.shape.role,
            copath: self
                .copath
                .iter()
                .map(|e| CopathJson {
                    level: e.level,
                    prefix: prefix_string(e.prefix, e.level),
                    seed: Bytes(e.seed.clone()),
                })
                .collect(),
            punctured: self.punctured.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PuncturedPrfKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PuncturedJson::deserialize(d)?;
        let shape =
            PrfShape::new(j.lambda, j.domain, j.range, j.role).map_err(de::Error::custom)?;
        let mut copath = Vec::with_capacity(j.copath.len());
        for e in j.copath {
            if e.prefix.len() != e.level as usize {
                return Err(de::Error::custom("copath prefix length differs from level"));
            }
            let prefix = if e.prefix.is_empty() {
                0
            } else {
                u64::from_str_radix(&e.prefix, 2).map_err(de::Error::custom)?
            };
            copath.push(CopathEntry {
                level: e.level,
                prefix,
                seed: e.seed.0,
            });
        }
        if j.punctured.is_empty() || j.punctured.len() > 2 {
            return Err(de::Error::custom("punctured set must have 1 or 2 points"));
        }
        Ok(PuncturedPrfKey {
            shape,
            copath,
            punctured: j.punctured,
        })
    }
}

impl PuncturedPrfKey {
    pub fn shape(&self) -> &PrfShape {
        &self.shape
    }

    pub fn domain(&self) -> u64 {
        self.shape.domain
    }

    pub fn range(&self) -> Result<u64> {
        self.shape.range()
    }

    pub fn punctured_points(&self) -> &[u64] {
        &self.punctured
    }

    pub fn copath(&self) -> &[CopathEntry] {
        &self.copath
    }

    fn leaf(&self, x: u64) -> Option<Vec<u8>> {
        if self.punctured.contains(&x) {
            return None;
        }
        let depth = self.shape.depth();
        let entry = self
            .copath
            .iter()
            .find(|e| x >> (depth - e.level) == e.prefix)?;
        Some(descend(entry.seed.clone(), x, entry.level, depth))
    }

    /// `None` is ⊥.
    pub fn eval_value(&self, x: u64) -> Result<Option<PrfValue>> {
        self.shape.check_point(x)?;
        Ok(self.leaf(x).map(|leaf| map_leaf(&self.shape, &leaf)))
    }

    /// `punctured_eval`: the range index at `x`, or ⊥ (`None`) on a punctured point.
    pub fn eval(&self, x: u64) -> Result<Option<u64>> {
        let r = self.range()?;
        self.shape.check_point(x)?;
        Ok(self.leaf(x).map(|leaf| leaf_to_index(&leaf, r)))
    }

    pub fn eval_bits(&self, x: u64) -> Result<Option<Vec<u8>>> {
        match self.eval_value(x)? {
            Some(PrfValue::Bits(b)) => Ok(Some(b)),
            Some(PrfValue::Index(_)) => {
                Err(Error::param("PRF has an index codomain, not bit strings"))
            }
            None => Ok(None),
        }
    }
}

/// Outcome of a rejection sampler.
#[derive(Debug, Clone)]
pub struct Sampled<T> {
    pub value: T,
    /// Total draws, including the accepted one.
    pub attempts: u64,
}

/// Draws root seeds until every range value has a preimage.
pub fn sample_surjective_prf(
    seed: &RunSeed,
    shape: PrfShape,
    budget: u64,
) -> Result<Sampled<(PrfKey, Vec<Vec<u64>>)>> {
    let range = shape.range()?;
    if shape.domain < range {
        return Err(Error::param(format!(
            "domain {} smaller than range {range}: no surjection exists",
            shape.domain
        )));
    }
    for attempt in 0..budget {
        let key = PrfKey::random(shape, &seed.derive(attempt));
        let table = key.preimage_table()?;
        if table.iter().all(|p| !p.is_empty()) {
            return Ok(Sampled {
                value: (key, table),
                attempts: attempt + 1,
            });
        }
    }
    Err(Error::SamplingFailure {
        what: format!(
            "surjective PRF [{}] -> [{range}]",
            shape.domain
        ),
        attempts: budget,
    })
}

/// Uniform element of an explicit preimage list.
pub fn sample_from_preimages(preimages: &[u64], seed: &RunSeed) -> Result<u64> {
    use rand::Rng;
    if preimages.is_empty() {
        return Err(Error::InvariantViolation("empty preimage set".into()));
    }
    let k = seed.rng().random_range(0..preimages.len());
    Ok(preimages[k])
}

/// Uniform `x` with `PRF(x) = y`, by full domain enumeration.
pub fn sample_uniform_preimage(key: &PrfKey, y: u64, seed: &RunSeed) -> Result<u64> {
    let r = key.range()?;
    if y >= r {
        return Err(Error::param(format!("range value {y} out of [0, {r})")));
    }
    let pre: Vec<u64> = key
        .evaluate_all()?
        .into_iter()
        .enumerate()
        .filter(|&(_, v)| v == y)
        .map(|(x, _)| x as u64)
        .collect();
    if pre.is_empty() {
        return Err(Error::InvariantViolation(format!(
            "range value {y} has no preimage"
        )));
    }
    sample_from_preimages(&pre, seed)
}

/// Draws root seeds until `PRF(point) = value`.
pub fn sample_conditioned_prf(
    seed: &RunSeed,
    shape: PrfShape,
    constraint: (u64, u64),
    budget: u64,
) -> Result<Sampled<PrfKey>> {
    let range = shape.range()?;
    let (point, value) = constraint;
    shape.check_point(point)?;
    if value >= range {
        return Err(Error::param(format!("constraint value {value} out of [0, {range})")));
    }
    for attempt in 0..budget {
        let key = PrfKey::random(shape, &seed.derive(attempt));
        if key.eval(point)? == value {
            return Ok(Sampled {
                value: key,
                attempts: attempt + 1,
            });
        }
    }
    Err(Error::SamplingFailure {
        what: format!("PRF conditioned on f({point}) = {value}"),
        attempts: budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(domain: u64, range: u64) -> PrfShape {
        PrfShape::index(64, domain, range, PrfRole::Generic).unwrap()
    }

    fn key(domain: u64, range: u64, seed: u64) -> PrfKey {
        PrfKey::random(shape(domain, range), &RunSeed::from_master(seed))
    }

    #[test]
    fn depth_of_small_domains() {
        assert_eq!(tree_depth(1), 0);
        assert_eq!(tree_depth(2), 1);
        assert_eq!(tree_depth(3), 2);
        assert_eq!(tree_depth(4), 2);
        assert_eq!(tree_depth(5), 3);
        assert_eq!(tree_depth(4096), 12);
    }

    #[test]
    fn eval_is_deterministic_and_in_range() {
        let k = key(100, 7, 1);
        for x in 0..100 {
            let y = k.eval(x).unwrap();
            assert!(y < 7);
            assert_eq!(y, k.eval(x).unwrap());
        }
    }

    #[test]
    fn range_one_is_always_zero() {
        let k = key(50, 1, 3);
        assert!((0..50).all(|x| k.eval(x).unwrap() == 0));
    }

    #[test]
    fn out_of_range_point_is_parameter_error() {
        let k = key(10, 4, 1);
        assert!(matches!(k.eval(10), Err(Error::Parameter(_))));
        assert!(k.puncture(&[10]).is_err());
    }

    #[test]
    fn histogram_over_full_domain_is_balanced() {
        let k = key(256, 4, 11);
        let mut counts = [0u32; 4];
        for x in 0..256 {
            counts[k.eval(x).unwrap() as usize] += 1;
        }
        for c in counts {
            let f = f64::from(c) / 256.0;
            assert!((f - 0.25).abs() <= 0.15, "frequency {f}");
        }
        // chi-square sanity at 3 degrees of freedom, p = 0.001 cutoff
        let chi2: f64 = counts
            .iter()
            .map(|&c| (f64::from(c) - 64.0).powi(2) / 64.0)
            .sum();
        assert!(chi2 < 16.27, "chi2 = {chi2}");
    }

    #[test]
    fn chunk_acceptance_is_exactly_uniform() {
        // Every accepted value arises from exactly one chunk: the mapping is a
        // bijection between accepted chunks and the range.
        for range in 1..=256u64 {
            let width = chunk_width(range).max(1);
            let mut hits = vec![0u32; range as usize];
            for chunk in 0..(1u64 << width) {
                if let Some(v) = accept_chunk(chunk, range) {
                    hits[v as usize] += 1;
                }
            }
            assert!(hits.iter().all(|&h| h == 1), "range {range}");
            // Acceptance probability is at least 1/2.
            assert!(2 * range > (1u64 << width) || range == 1);
        }
    }

    #[test]
    fn single_puncture_agrees_elsewhere() {
        let k = key(64, 5, 2);
        let p = k.puncture(&[17]).unwrap();
        for x in 0..64 {
            if x == 17 {
                assert_eq!(p.eval(x).unwrap(), None);
            } else {
                assert_eq!(p.eval(x).unwrap(), Some(k.eval(x).unwrap()));
            }
        }
    }

    #[test]
    fn double_puncture_agrees_elsewhere() {
        let k = key(64, 5, 2);
        let p = k.puncture(&[3, 60]).unwrap();
        for x in 0..64 {
            let got = p.eval(x).unwrap();
            if x == 3 || x == 60 {
                assert_eq!(got, None);
            } else {
                assert_eq!(got, Some(k.eval(x).unwrap()));
            }
        }
    }

    #[test]
    fn copath_size_matches_tree_shape() {
        let k = key(64, 2, 9);
        // one point: one sibling per level
        assert_eq!(k.puncture(&[5]).unwrap().copath().len(), 6);
        // siblings 0 and 1 share the path down to the last level
        assert_eq!(k.puncture(&[0, 1]).unwrap().copath().len(), 5);
        // paths split at the root: every level has two siblings
        assert_eq!(k.puncture(&[0, 63]).unwrap().copath().len(), 10);
    }

    #[test]
    fn puncture_rejects_bad_sets() {
        let k = key(16, 2, 1);
        assert!(k.puncture(&[]).is_err());
        assert!(k.puncture(&[1, 1]).is_err());
        assert!(k.puncture(&[1, 2, 3]).is_err());
    }

    #[test]
    fn domain_of_one_punctures_to_empty_copath() {
        let k = key(1, 3, 1);
        let p = k.puncture(&[0]).unwrap();
        assert!(p.copath().is_empty());
        assert_eq!(p.eval(0).unwrap(), None);
    }

    #[test]
    fn bit_codomain() {
        let s = PrfShape::new(64, 8, Codomain::Bits(32), PrfRole::SkShortctext).unwrap();
        let k = PrfKey::random(s, &RunSeed::from_master(1));
        let v = k.eval_bits(3).unwrap();
        assert_eq!(v.len(), 4);
        assert!(k.eval(3).is_err());
        let p = k.puncture(&[3]).unwrap();
        assert_eq!(p.eval_bits(3).unwrap(), None);
        assert_eq!(p.eval_bits(4).unwrap(), Some(k.eval_bits(4).unwrap()));
    }

    #[test]
    fn json_layout() {
        let k = key(256, 8, 4);
        let j = serde_json::to_string(&k).unwrap();
        assert!(j.starts_with(r#"{"lambda":64,"domain":256,"range":8,"root_seed":""#), "{j}");
        let back: PrfKey = serde_json::from_str(&j).unwrap();
        assert_eq!(back, k);

        let p = k.puncture(&[1, 200]).unwrap();
        let pj = serde_json::to_value(&p).unwrap();
        assert_eq!(pj["punctured"], serde_json::json!([1, 200]));
        assert_eq!(pj["copath"][0]["level"], 2);
        assert_eq!(pj["copath"][0]["prefix"], "01");
        let back: PuncturedPrfKey = serde_json::from_value(pj).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn surjective_sampling_covers_range() {
        let s = sample_surjective_prf(&RunSeed::from_master(1), shape(64, 4), 10_000).unwrap();
        let (k, table) = s.value;
        assert!(table.iter().all(|p| !p.is_empty()));
        assert_eq!(table, k.preimage_table().unwrap());
    }

    #[test]
    fn surjective_sampling_pigeonhole() {
        let r = sample_surjective_prf(&RunSeed::from_master(1), shape(3, 4), 10_000);
        assert!(matches!(r, Err(Error::Parameter(_))));
    }

    #[test]
    fn surjective_sampling_tight_domain() {
        // m = n = 4: success needs a permutation (prob 4!/4^4 ≈ 0.094 per draw).
        match sample_surjective_prf(&RunSeed::from_master(8), shape(4, 4), 10_000) {
            Ok(s) => {
                let mut t = s.value.0.evaluate_all().unwrap();
                t.sort_unstable();
                assert_eq!(t, vec![0, 1, 2, 3]);
            }
            Err(e) => assert!(matches!(e, Error::SamplingFailure { .. })),
        }
        // Budget of one draw on a hopeless shape surfaces as a sampling failure.
        let r = sample_surjective_prf(&RunSeed::from_master(8), shape(16, 16), 1);
        assert!(matches!(r, Err(Error::SamplingFailure { attempts: 1, .. })));
    }

    #[test]
    fn surjective_first_try_when_domain_is_large() {
        let first = (0..100u64)
            .filter(|&t| {
                sample_surjective_prf(&RunSeed::from_master(t), shape(256, 8), 10_000)
                    .unwrap()
                    .attempts
                    == 1
            })
            .count();
        // coupon collector: P(miss some value) <= 8 (7/8)^256 ≈ 1.1e-14
        assert!(first >= 95, "{first}");
    }

    #[test]
    fn preimage_sampling() {
        let k = key(32, 3, 5);
        let table = k.preimage_table().unwrap();
        for y in 0..3 {
            if table[y as usize].is_empty() {
                continue;
            }
            let x = sample_uniform_preimage(&k, y, &RunSeed::from_master(y)).unwrap();
            assert_eq!(k.eval(x).unwrap(), y);
        }
    }

    #[test]
    fn empty_preimage_is_invariant_violation() {
        // Find a key over a tiny domain that misses some value.
        let shape = shape(2, 4);
        let k = (0..)
            .map(|t| PrfKey::random(shape, &RunSeed::from_master(t)))
            .find(|k| k.preimage_table().unwrap().iter().any(|p| p.is_empty()))
            .unwrap();
        let y = k
            .preimage_table()
            .unwrap()
            .iter()
            .position(|p| p.is_empty())
            .unwrap() as u64;
        let r = sample_uniform_preimage(&k, y, &RunSeed::from_master(0));
        assert!(matches!(r, Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn conditioned_sampling_meets_constraint() {
        for t in 0..50 {
            let s = sample_conditioned_prf(&RunSeed::from_master(t), shape(8, 2), (5, 1), 10_000)
                .unwrap();
            assert_eq!(s.value.eval(5).unwrap(), 1);
        }
    }

    #[test]
    fn conditioned_sampling_bad_constraint() {
        let r = sample_conditioned_prf(&RunSeed::from_master(0), shape(8, 2), (5, 2), 10);
        assert!(matches!(r, Err(Error::Parameter(_))));
    }
}
