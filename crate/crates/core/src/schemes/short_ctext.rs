//! Short-ciphertext scheme: ciphertexts are indices in `[m]`, user keys carry
//! an obfuscated decryption program.
//!
//! `PRF_sk : [n] → {0,1}^{λ/2}` gives each user a PRG seed `s_i`;
//! `PRF_Enc : [m] → {0,…,n}` is sampled surjective, and encrypting to `j` picks a
//! uniform preimage of `j`.

use serde::{Deserialize, Serialize};

use super::{default_m, validate_common};
use crate::error::{Error, Result};
use crate::obf::{obfuscate, ObfuscatedProgram, Output, ProgramDescriptor, ProgramInput};
use crate::primitives::{
    prg_raw, sample_from_preimages, sample_surjective_prf, Bytes, Codomain, PrfKey, PrfRole,
    PrfShape, RunSeed, DEFAULT_REJECTION_BUDGET,
};

pub const DEFAULT_M_EXPONENT: u32 = 7;

/// Largest `m` the setup will enumerate when sampling a surjective `PRF_Enc`.
pub const MAX_CIPHERTEXT_SPACE: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScParams {
    pub lambda_bits: u32,
    pub n: u64,
    pub m: u64,
}

impl ScParams {
    /// `m = None` selects the default size for `n`.
    pub fn new(lambda_bits: u32, n: u64, m: Option<u64>) -> Result<Self> {
        let m = match m {
            Some(m) => m,
            None => default_m(n, DEFAULT_M_EXPONENT)?.max(n + 1),
        };
        let p = ScParams { lambda_bits, n, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        validate_common(self.lambda_bits, self.n)?;
        // PRF_Enc must hit all of {0, …, n}.
        if self.m < self.n + 1 {
            return Err(Error::param(format!(
                "m = {} cannot cover the {} ciphertext indices 0..={}",
                self.m,
                self.n + 1,
                self.n
            )));
        }
        if self.m > MAX_CIPHERTEXT_SPACE {
            return Err(Error::Capacity(format!(
                "m = {} exceeds the enumerable ciphertext space {MAX_CIPHERTEXT_SPACE}; pass a smaller m",
                self.m
            )));
        }
        Ok(())
    }

    pub fn sk_shape(&self) -> Result<PrfShape> {
        PrfShape::new(
            self.lambda_bits,
            self.n,
            Codomain::Bits(self.lambda_bits / 2),
            PrfRole::SkShortctext,
        )
    }

    pub fn enc_shape(&self) -> Result<PrfShape> {
        PrfShape::index(self.lambda_bits, self.m, self.n + 1, PrfRole::EncShortctext)
    }
}

/// `sk_i = (i, s_i, O)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScUserKey {
    pub i: u64,
    pub s: Bytes,
    pub program: ObfuscatedProgram,
}

/// `mk = PRF_Enc`, with its preimage table cached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScMasterKey {
    pub prf_enc: PrfKey,
    pub preimage_table: Vec<Vec<u64>>,
}

impl ScMasterKey {
    pub fn new(prf_enc: PrfKey) -> Result<Self> {
        let preimage_table = prf_enc.preimage_table()?;
        Ok(ScMasterKey {
            prf_enc,
            preimage_table,
        })
    }

    pub fn n(&self) -> u64 {
        self.preimage_table.len() as u64 - 1
    }

    pub fn m(&self) -> u64 {
        self.prf_enc.domain()
    }

    /// Checks the cached table against a fresh enumeration.
    pub fn check_table(&self) -> Result<()> {
        if self.prf_enc.preimage_table()? != self.preimage_table {
            return Err(Error::InvariantViolation(
                "cached preimage table disagrees with PRF_Enc".into(),
            ));
        }
        Ok(())
    }
}

/// Everything `Setup` produced, including `PRF_sk` for building hybrids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScSystem {
    pub params: ScParams,
    pub users: Vec<ScUserKey>,
    pub master: ScMasterKey,
    pub prf_sk: PrfKey,
    /// Rejections before a surjective `PRF_Enc` was found, plus one.
    pub setup_attempts: u64,
}

pub fn setup(params: ScParams, backend: &str, seed: &RunSeed) -> Result<ScSystem> {
    params.validate()?;
    let prf_sk = PrfKey::random(params.sk_shape()?, &seed.derive("prf-sk"));
    let sampled = sample_surjective_prf(
        &seed.derive("prf-enc"),
        params.enc_shape()?,
        DEFAULT_REJECTION_BUDGET,
    )?;
    let (prf_enc, preimage_table) = sampled.value;
    let program = obfuscate(
        ProgramDescriptor::ScP {
            prf_sk: prf_sk.clone(),
            prf_enc: prf_enc.clone(),
        },
        backend,
        &seed.derive("obfuscate"),
    )?;
    let users = (1..=params.n)
        .map(|i| {
            Ok(ScUserKey {
                i,
                s: Bytes(prf_sk.eval_bits(i - 1)?),
                program: program.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScSystem {
        params,
        users,
        master: ScMasterKey {
            prf_enc,
            preimage_table,
        },
        prf_sk,
        setup_attempts: sampled.attempts,
    })
}

/// Uniform `c` with `PRF_Enc(c) = j`.
pub fn encrypt(mk: &ScMasterKey, j: u64, seed: &RunSeed) -> Result<u64> {
    let n = mk.n();
    if j > n {
        return Err(Error::param(format!("index {j} out of 0..={n}")));
    }
    sample_from_preimages(&mk.preimage_table[j as usize], seed)
}

/// `O(c, i, s_i)`.
pub fn decrypt(sk: &ScUserKey, c: u64) -> Result<Output> {
    sk.program.evaluate(&ProgramInput::Sc {
        c,
        i: sk.i,
        s: sk.s.clone(),
    })
}

/// Challenge values hardcoded by the level-3 and level-4 programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScChallenge {
    pub c0: u64,
    pub b0: u8,
    pub c1: u64,
    pub b1: u8,
}

/// How level 1 picks `x*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XStar {
    /// `x* = PRG(PRF_sk(i*))`.
    #[default]
    Honest,
    /// A fresh uniform λ-bit string.
    Uniform,
}

/// Program for hybrid `level` (0 is the real program).
pub fn build_hybrid_sc(
    level: u8,
    sys: &ScSystem,
    i_star: u64,
    challenge: Option<ScChallenge>,
    x_star: XStar,
    seed: &RunSeed,
) -> Result<ProgramDescriptor> {
    let n = sys.params.n;
    if i_star == 0 || i_star > n {
        return Err(Error::param(format!("i* = {i_star} out of 1..={n}")));
    }
    let prf_enc = sys.master.prf_enc.clone();
    if level == 0 {
        return Ok(ProgramDescriptor::ScP {
            prf_sk: sys.prf_sk.clone(),
            prf_enc,
        });
    }
    let punctured_sk = sys.prf_sk.puncture(&[i_star - 1])?;
    let need_challenge = || {
        challenge.ok_or_else(|| Error::param(format!("level {level} needs the challenge ciphertexts")))
    };
    let puncture_enc = |ch: &ScChallenge| {
        let mut pts = vec![ch.c0];
        if ch.c1 != ch.c0 {
            pts.push(ch.c1);
        }
        prf_enc.puncture(&pts)
    };
    Ok(match level {
        1 => {
            let x = match x_star {
                XStar::Honest => prg_raw(&sys.prf_sk.eval_bits(i_star - 1)?),
                XStar::Uniform => seed.derive("x-star").bytes(sys.params.lambda_bits as usize / 8),
            };
            ProgramDescriptor::ScP1 {
                prf_sk: punctured_sk,
                prf_enc,
                i_star,
                x_star: Bytes(x),
            }
        }
        2 => ProgramDescriptor::ScP2 {
            prf_sk: punctured_sk,
            prf_enc,
            i_star,
        },
        3 => {
            let ch = need_challenge()?;
            ProgramDescriptor::ScP3 {
                prf_sk: punctured_sk,
                prf_enc: puncture_enc(&ch)?,
                i_star,
                c0: ch.c0,
                b0: ch.b0,
                c1: ch.c1,
                b1: ch.b1,
            }
        }
        4 => {
            let ch = need_challenge()?;
            ProgramDescriptor::ScP4 {
                prf_sk: punctured_sk,
                prf_enc: puncture_enc(&ch)?,
                i_star,
                c0: ch.c0,
                c1: ch.c1,
            }
        }
        _ => return Err(Error::param(format!("short-ctext hybrid level {level} not in 0..=4"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obf::TRANSPARENT;

    fn sys(n: u64, m: u64, seed: u64) -> ScSystem {
        setup(
            ScParams::new(64, n, Some(m)).unwrap(),
            TRANSPARENT,
            &RunSeed::from_master(seed),
        )
        .unwrap()
    }

    #[test]
    fn decrypts_per_threshold() {
        let s = sys(6, 64, 1);
        for j in 0..=6 {
            for t in 0..5u64 {
                let c = encrypt(&s.master, j, &RunSeed::from_master(t)).unwrap();
                for k in &s.users {
                    assert_eq!(decrypt(k, c).unwrap(), Output::bit(k.i <= j));
                }
            }
        }
    }

    #[test]
    fn too_small_m_is_rejected() {
        assert!(matches!(ScParams::new(64, 4, Some(3)), Err(Error::Parameter(_))));
    }

    #[test]
    fn tampered_secret_gives_bottom() {
        let s = sys(4, 32, 2);
        let mut k = s.users[1].clone();
        k.s.0[0] ^= 1;
        let c = encrypt(&s.master, 4, &RunSeed::from_master(0)).unwrap();
        assert_eq!(decrypt(&k, c).unwrap(), Output::Bottom);
    }

    #[test]
    fn default_m_grows_like_n7() {
        assert_eq!(ScParams::new(64, 2, None).unwrap().m, 128);
        assert_eq!(ScParams::new(64, 1, None).unwrap().m, 2);
        assert!(matches!(ScParams::new(64, 10, None), Err(Error::Capacity(_))));
    }

    #[test]
    fn secret_is_half_lambda() {
        let s = sys(3, 16, 3);
        assert!(s.users.iter().all(|k| k.s.0.len() == 4));
    }
}
