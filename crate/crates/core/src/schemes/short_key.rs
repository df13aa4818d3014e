//! Short-key scheme: user keys are pairs `(i, s_i) ∈ [n] × [m]`, ciphertexts are
//! obfuscated programs.
//!
//! `PRF_sk : [n] → [m]` fixes the valid secrets. Each ciphertext carries a fresh
//! `PRF_Enc : [n]×[m] → {0,1}` (flattened as `(i-1)·m + s`) that answers every
//! invalid pair, so valid and invalid pairs look alike.

use serde::{Deserialize, Serialize};

use super::{default_m, validate_common};
use crate::error::{Error, Result};
use crate::obf::{obfuscate, ObfuscatedProgram, Output, ProgramDescriptor, ProgramInput};
use crate::primitives::{
    sample_conditioned_prf, PrfKey, PrfRole, PrfShape, RunSeed, DEFAULT_REJECTION_BUDGET,
};

pub const DEFAULT_M_EXPONENT: u32 = 6;

/// Largest `n·m` accepted, so a program's domain stays enumerable.
pub const MAX_PAIR_SPACE: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkParams {
    pub lambda_bits: u32,
    pub n: u64,
    pub m: u64,
}

impl SkParams {
    pub fn new(lambda_bits: u32, n: u64, m: Option<u64>) -> Result<Self> {
        let m = match m {
            Some(m) => m,
            None => default_m(n, DEFAULT_M_EXPONENT)?.max(2),
        };
        let p = SkParams { lambda_bits, n, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        validate_common(self.lambda_bits, self.n)?;
        if self.m < 2 {
            return Err(Error::param(format!("m = {} must be at least 2", self.m)));
        }
        if self.n.saturating_mul(self.m) > MAX_PAIR_SPACE {
            return Err(Error::Capacity(format!(
                "n·m = {}·{} exceeds {MAX_PAIR_SPACE}; pass a smaller m",
                self.n, self.m
            )));
        }
        Ok(())
    }

    pub fn sk_shape(&self) -> Result<PrfShape> {
        PrfShape::index(self.lambda_bits, self.n, self.m, PrfRole::SkShortkey)
    }

    pub fn enc_shape(&self) -> Result<PrfShape> {
        PrfShape::index(self.lambda_bits, self.n * self.m, 2, PrfRole::EncShortkey)
    }

    /// Flattened `PRF_Enc` domain point of `(i, s)`.
    pub fn pair_index(&self, i: u64, s: u64) -> u64 {
        (i - 1) * self.m + s
    }

    /// Bits in a serialized key: `⌈log₂ n⌉ + ⌈log₂ m⌉`.
    pub fn key_bits(&self) -> u32 {
        crate::primitives::tree_depth(self.n) + crate::primitives::tree_depth(self.m)
    }
}

/// `sk_i = (i, s_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SkUserKey {
    pub i: u64,
    pub s: u64,
}

/// `mk = PRF_sk`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkMasterKey {
    pub params: SkParams,
    pub prf_sk: PrfKey,
    pub backend: String,
}

impl SkMasterKey {
    /// Re-derives every user key.
    pub fn user_keys(&self) -> Result<Vec<SkUserKey>> {
        (1..=self.params.n)
            .map(|i| {
                Ok(SkUserKey {
                    i,
                    s: self.prf_sk.eval(i - 1)?,
                })
            })
            .collect()
    }
}

/// A ciphertext is an obfuscated program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SkCiphertext {
    pub program: ObfuscatedProgram,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkSystem {
    pub params: SkParams,
    pub users: Vec<SkUserKey>,
    pub master: SkMasterKey,
}

pub fn setup(params: SkParams, backend: &str, seed: &RunSeed) -> Result<SkSystem> {
    params.validate()?;
    let prf_sk = PrfKey::random(params.sk_shape()?, &seed.derive("prf-sk"));
    let master = SkMasterKey {
        params,
        prf_sk,
        backend: backend.to_owned(),
    };
    Ok(SkSystem {
        params,
        users: master.user_keys()?,
        master,
    })
}

fn fresh_enc_key(params: &SkParams, seed: &RunSeed) -> Result<PrfKey> {
    Ok(PrfKey::random(params.enc_shape()?, &seed.derive("prf-enc")))
}

fn wrap(mk: &SkMasterKey, d: ProgramDescriptor, seed: &RunSeed) -> Result<SkCiphertext> {
    Ok(SkCiphertext {
        program: obfuscate(d, &mk.backend, &seed.derive("obfuscate"))?,
    })
}

/// `Obfuscate(P_{j, PRF_sk, PRF_Enc})` for a fresh `PRF_Enc`.
pub fn encrypt(mk: &SkMasterKey, j: u64, seed: &RunSeed) -> Result<SkCiphertext> {
    let n = mk.params.n;
    if j > n {
        return Err(Error::param(format!("index {j} out of 0..={n}")));
    }
    let d = ProgramDescriptor::SkP {
        j,
        prf_sk: mk.prf_sk.clone(),
        prf_enc: fresh_enc_key(&mk.params, seed)?,
    };
    wrap(mk, d, seed)
}

/// `O(i, s_i)`.
pub fn decrypt(sk: &SkUserKey, c: &SkCiphertext) -> Result<Output> {
    c.program.evaluate(&ProgramInput::Sk { i: sk.i, s: sk.s })
}

/// Sampling record of a hybrid ciphertext.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkHybridContext {
    pub level: u8,
    pub i_star: u64,
    pub b0: u8,
    pub s_star: Option<u64>,
    pub s_tilde: Option<u64>,
    /// The unpunctured `PRF_Enc` behind the ciphertext.
    pub prf_enc: PrfKey,
    /// Draws used by conditioned sampling (levels 4 and 5).
    pub conditioned_attempts: Option<u64>,
}

/// Challenge ciphertext under `(Enc^level, P^level)`; level 0 is honest
/// encryption to `i* - b0`.
///
/// `s_tilde` lets two challenge ciphertexts share one `s̃`; when `None` it is
/// drawn from `seed`. Levels 4 and 5 draw the same conditioned key from the
/// same seed, and level 6 ignores `b0`.
pub fn build_hybrid_sk(
    level: u8,
    mk: &SkMasterKey,
    i_star: u64,
    b0: u8,
    s_tilde: Option<u64>,
    seed: &RunSeed,
) -> Result<(SkCiphertext, SkHybridContext)> {
    let p = mk.params;
    if i_star == 0 || i_star > p.n {
        return Err(Error::param(format!("i* = {i_star} out of 1..={}", p.n)));
    }
    if b0 > 1 {
        return Err(Error::param(format!("b0 = {b0} is not a bit")));
    }
    if matches!(s_tilde, Some(s) if s >= p.m) {
        return Err(Error::param("s̃ out of [m]"));
    }
    use rand::Rng;
    let s_tilde = s_tilde.unwrap_or_else(|| seed.derive("s-tilde").rng().random_range(0..p.m));
    let x_tilde = p.pair_index(i_star, s_tilde);
    let punctured_sk = || mk.prf_sk.puncture(&[i_star - 1]);
    let conditioned = || {
        sample_conditioned_prf(
            &seed.derive("prf-enc-conditioned"),
            p.enc_shape()?,
            (x_tilde, u64::from(1 - b0)),
            DEFAULT_REJECTION_BUDGET,
        )
    };
    let mut ctx = SkHybridContext {
        level,
        i_star,
        b0,
        s_star: None,
        s_tilde: None,
        prf_enc: fresh_enc_key(&p, seed)?,
        conditioned_attempts: None,
    };

    let d = match level {
        0 => ProgramDescriptor::SkP {
            j: i_star - u64::from(b0),
            prf_sk: mk.prf_sk.clone(),
            prf_enc: ctx.prf_enc.clone(),
        },
        1 => {
            let s_star = mk.prf_sk.eval(i_star - 1)?;
            ctx.s_star = Some(s_star);
            ProgramDescriptor::SkP1 {
                i_star,
                b0,
                s_star,
                prf_sk: punctured_sk()?,
                prf_enc: ctx.prf_enc.clone(),
            }
        }
        2 => {
            ctx.s_tilde = Some(s_tilde);
            ProgramDescriptor::SkP2 {
                i_star,
                b0,
                s_tilde,
                prf_sk: punctured_sk()?,
                prf_enc: ctx.prf_enc.clone(),
            }
        }
        3 => {
            ctx.s_tilde = Some(s_tilde);
            ProgramDescriptor::SkP3 {
                i_star,
                b0,
                s_tilde,
                prf_sk: punctured_sk()?,
                prf_enc: ctx.prf_enc.puncture(&[x_tilde])?,
            }
        }
        4 => {
            let k = conditioned()?;
            ctx.s_tilde = Some(s_tilde);
            ctx.conditioned_attempts = Some(k.attempts);
            ctx.prf_enc = k.value;
            ProgramDescriptor::SkP4 {
                i_star,
                b0,
                s_tilde,
                prf_sk: punctured_sk()?,
                prf_enc: ctx.prf_enc.puncture(&[x_tilde])?,
            }
        }
        5 => {
            let k = conditioned()?;
            ctx.s_tilde = Some(s_tilde);
            ctx.conditioned_attempts = Some(k.attempts);
            ctx.prf_enc = k.value;
            ProgramDescriptor::SkP5 {
                i_star,
                prf_sk: punctured_sk()?,
                prf_enc: ctx.prf_enc.clone(),
            }
        }
        6 => {
            ctx.b0 = 0;
            ProgramDescriptor::SkP6 {
                i_star,
                prf_sk: punctured_sk()?,
                prf_enc: ctx.prf_enc.clone(),
            }
        }
        _ => return Err(Error::param(format!("short-key hybrid level {level} not in 0..=6"))),
    };
    Ok((wrap(mk, d, seed)?, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obf::TRANSPARENT;

    fn sys(n: u64, m: u64) -> SkSystem {
        setup(
            SkParams::new(64, n, Some(m)).unwrap(),
            TRANSPARENT,
            &RunSeed::from_master(5),
        )
        .unwrap()
    }

    #[test]
    fn decrypts_per_threshold() {
        let s = sys(4, 16);
        for j in 0..=4 {
            let c = encrypt(&s.master, j, &RunSeed::from_master(j)).unwrap();
            for k in &s.users {
                assert_eq!(decrypt(k, &c).unwrap(), Output::bit(k.i <= j));
            }
        }
    }

    #[test]
    fn dishonest_pair_reads_prf_enc() {
        let s = sys(4, 16);
        let c = encrypt(&s.master, 2, &RunSeed::from_master(1)).unwrap();
        let ProgramDescriptor::SkP { prf_enc, .. } = &c.program.program else {
            panic!("honest ciphertext must be SK-P");
        };
        let k = s.users[2];
        let s_bad = (k.s + 1) % 16;
        let got = c.program.evaluate(&ProgramInput::Sk { i: k.i, s: s_bad }).unwrap();
        let want = prf_enc.eval(s.params.pair_index(k.i, s_bad)).unwrap();
        assert_eq!(got.as_bit(), Some(want as u8));
    }

    #[test]
    fn key_bits() {
        assert_eq!(SkParams::new(64, 4, Some(16)).unwrap().key_bits(), 2 + 4);
        assert_eq!(SkParams::new(64, 5, Some(10)).unwrap().key_bits(), 3 + 4);
    }

    #[test]
    fn level_zero_matches_encrypt() {
        let s = sys(4, 16);
        let seed = RunSeed::from_master(9);
        let (c, _) = build_hybrid_sk(0, &s.master, 3, 1, None, &seed).unwrap();
        assert_eq!(c, encrypt(&s.master, 2, &seed).unwrap());
    }

    #[test]
    fn bad_hybrid_inputs() {
        let s = sys(4, 16);
        let seed = RunSeed::from_master(0);
        assert!(build_hybrid_sk(7, &s.master, 1, 0, None, &seed).is_err());
        assert!(build_hybrid_sk(1, &s.master, 5, 0, None, &seed).is_err());
        assert!(build_hybrid_sk(1, &s.master, 1, 2, None, &seed).is_err());
    }
}
