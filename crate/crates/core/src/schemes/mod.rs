//! The two traitor-tracing schemes and a uniform front end over them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::obf::Output;
use crate::primitives::{check_lambda, tree_depth, RunSeed};

pub mod correctness;
pub mod hybrid_check;
pub mod short_ctext;
pub mod short_key;

pub use correctness::{check_correctness, CorrectnessFailure, CorrectnessReport, Coverage};
pub use hybrid_check::{check_hybrids, Expectation, HybridReport, HybridStep};
pub use short_ctext::{ScMasterKey, ScParams, ScSystem, ScUserKey};
pub use short_key::{SkCiphertext, SkMasterKey, SkParams, SkSystem, SkUserKey};

/// `n^e · max(1, ⌈log₂ n⌉²)`.
pub fn default_m(n: u64, exponent: u32) -> Result<u64> {
    let log = u64::from(tree_depth(n)).max(1);
    n.checked_pow(exponent)
        .and_then(|p| p.checked_mul(log * log))
        .ok_or_else(|| Error::Capacity(format!("default m for n = {n} overflows; pass m explicitly")))
}

pub(crate) fn validate_common(lambda_bits: u32, n: u64) -> Result<()> {
    check_lambda(lambda_bits)?;
    if n == 0 {
        return Err(Error::param("need at least one user"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    ShortCtext,
    ShortKey,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::ShortCtext => "short-ctext",
            SchemeKind::ShortKey => "short-key",
        }
    }

    pub fn default_m_exponent(self) -> u32 {
        match self {
            SchemeKind::ShortCtext => short_ctext::DEFAULT_M_EXPONENT,
            SchemeKind::ShortKey => short_key::DEFAULT_M_EXPONENT,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "short-ctext" => Ok(SchemeKind::ShortCtext),
            "short-key" => Ok(SchemeKind::ShortKey),
            _ => Err(Error::Configuration(format!("unknown scheme {s:?}"))),
        }
    }
}

/// Scheme choice plus its resolved parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub scheme: SchemeKind,
    pub lambda_bits: u32,
    pub n: u64,
    pub m: u64,
    pub backend: String,
}

impl SchemeParams {
    /// `m = None` applies the scheme's default size.
    pub fn new(scheme: SchemeKind, lambda_bits: u32, n: u64, m: Option<u64>) -> Result<Self> {
        let m = match scheme {
            SchemeKind::ShortCtext => ScParams::new(lambda_bits, n, m)?.m,
            SchemeKind::ShortKey => SkParams::new(lambda_bits, n, m)?.m,
        };
        Ok(SchemeParams {
            scheme,
            lambda_bits,
            n,
            m,
            backend: crate::obf::TRANSPARENT.to_owned(),
        })
    }
}

/// A user key of either scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum UserKey {
    ShortCtext(ScUserKey),
    ShortKey(SkUserKey),
}

impl UserKey {
    pub fn index(&self) -> u64 {
        match self {
            UserKey::ShortCtext(k) => k.i,
            UserKey::ShortKey(k) => k.i,
        }
    }
}

/// A ciphertext of either scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", content = "ciphertext", rename_all = "kebab-case")]
pub enum Ciphertext {
    ShortCtext(u64),
    ShortKey(SkCiphertext),
}

/// A master key of either scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum MasterKey {
    ShortCtext(ScMasterKey),
    ShortKey(SkMasterKey),
}

impl MasterKey {
    pub fn encrypt(&self, j: u64, seed: &RunSeed) -> Result<Ciphertext> {
        match self {
            MasterKey::ShortCtext(mk) => short_ctext::encrypt(mk, j, seed).map(Ciphertext::ShortCtext),
            MasterKey::ShortKey(mk) => short_key::encrypt(mk, j, seed).map(Ciphertext::ShortKey),
        }
    }

    pub fn n(&self) -> u64 {
        match self {
            MasterKey::ShortCtext(mk) => mk.n(),
            MasterKey::ShortKey(mk) => mk.params.n,
        }
    }
}

/// Output of `Setup`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum Instance {
    ShortCtext(ScSystem),
    ShortKey(SkSystem),
}

pub fn setup(params: &SchemeParams, seed: &RunSeed) -> Result<Instance> {
    match params.scheme {
        SchemeKind::ShortCtext => {
            let p = ScParams {
                lambda_bits: params.lambda_bits,
                n: params.n,
                m: params.m,
            };
            short_ctext::setup(p, &params.backend, seed).map(Instance::ShortCtext)
        }
        SchemeKind::ShortKey => {
            let p = SkParams {
                lambda_bits: params.lambda_bits,
                n: params.n,
                m: params.m,
            };
            short_key::setup(p, &params.backend, seed).map(Instance::ShortKey)
        }
    }
}

impl Instance {
    pub fn kind(&self) -> SchemeKind {
        match self {
            Instance::ShortCtext(_) => SchemeKind::ShortCtext,
            Instance::ShortKey(_) => SchemeKind::ShortKey,
        }
    }

    pub fn n(&self) -> u64 {
        match self {
            Instance::ShortCtext(s) => s.params.n,
            Instance::ShortKey(s) => s.params.n,
        }
    }

    pub fn m(&self) -> u64 {
        match self {
            Instance::ShortCtext(s) => s.params.m,
            Instance::ShortKey(s) => s.params.m,
        }
    }

    /// Key of user `i` (1-based).
    pub fn user(&self, i: u64) -> Result<UserKey> {
        let n = self.n();
        if i == 0 || i > n {
            return Err(Error::param(format!("user {i} out of 1..={n}")));
        }
        let k = (i - 1) as usize;
        Ok(match self {
            Instance::ShortCtext(s) => UserKey::ShortCtext(s.users[k].clone()),
            Instance::ShortKey(s) => UserKey::ShortKey(s.users[k]),
        })
    }

    pub fn users(&self) -> Vec<UserKey> {
        match self {
            Instance::ShortCtext(s) => s.users.iter().cloned().map(UserKey::ShortCtext).collect(),
            Instance::ShortKey(s) => s.users.iter().copied().map(UserKey::ShortKey).collect(),
        }
    }

    pub fn master(&self) -> MasterKey {
        match self {
            Instance::ShortCtext(s) => MasterKey::ShortCtext(s.master.clone()),
            Instance::ShortKey(s) => MasterKey::ShortKey(s.master.clone()),
        }
    }

    pub fn encrypt(&self, j: u64, seed: &RunSeed) -> Result<Ciphertext> {
        match self {
            Instance::ShortCtext(s) => {
                short_ctext::encrypt(&s.master, j, seed).map(Ciphertext::ShortCtext)
            }
            Instance::ShortKey(s) => short_key::encrypt(&s.master, j, seed).map(Ciphertext::ShortKey),
        }
    }
}

pub fn decrypt(key: &UserKey, c: &Ciphertext) -> Result<Output> {
    match (key, c) {
        (UserKey::ShortCtext(k), Ciphertext::ShortCtext(c)) => short_ctext::decrypt(k, *c),
        (UserKey::ShortKey(k), Ciphertext::ShortKey(c)) => short_key::decrypt(k, c),
        _ => Err(Error::param("key and ciphertext belong to different schemes")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_m_formula() {
        assert_eq!(default_m(1, 7).unwrap(), 1);
        assert_eq!(default_m(2, 7).unwrap(), 128);
        assert_eq!(default_m(4, 6).unwrap(), 4096 * 4);
        assert_eq!(default_m(5, 6).unwrap(), 15625 * 9);
        assert!(default_m(1 << 20, 7).is_err());
    }

    #[test]
    fn scheme_names_round_trip() {
        for k in [SchemeKind::ShortCtext, SchemeKind::ShortKey] {
            assert_eq!(k.name().parse::<SchemeKind>().unwrap(), k);
        }
        assert!(matches!("long".parse::<SchemeKind>(), Err(Error::Configuration(_))));
    }
}
