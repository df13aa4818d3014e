//! Interpretable programs: the short-ciphertext decryption program and its
//! hybrids (`SC-*`), and the short-key ciphertext program and its hybrids (`SK-*`).
//!
//! Users are numbered `1..=n`. A short-ciphertext program takes `(c, i, s)` with
//! `c ∈ [m]` and `s` a λ/2-bit string; a short-key program takes `(i, s)` with
//! `s ∈ [m]`. Evaluation follows each figure top to bottom; a guard that yields ⊥
//! stops evaluation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{prg_raw, Bytes, PrfKey, PrfValue, PuncturedPrfKey};

/// A program output: a bit or ⊥.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Output {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "bot")]
    Bottom,
}

impl Output {
    pub fn bit(b: bool) -> Self {
        if b {
            Output::One
        } else {
            Output::Zero
        }
    }

    /// `None` for ⊥.
    pub fn as_bit(self) -> Option<u8> {
        match self {
            Output::Zero => Some(0),
            Output::One => Some(1),
            Output::Bottom => None,
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Output::Zero => "0",
            Output::One => "1",
            Output::Bottom => "⊥",
        })
    }
}

/// Input tuple for a program.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProgramInput {
    Sc { c: u64, i: u64, s: Bytes },
    Sk { i: u64, s: u64 },
}

impl fmt::Display for ProgramInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramInput::Sc { c, i, s } => write!(f, "(c={c}, i={i}, s={})", hex::encode(&s.0)),
            ProgramInput::Sk { i, s } => write!(f, "(i={i}, s={s})"),
        }
    }
}

/// Either key form; the hybrids swap one for the other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyPrfKey {
    Full(PrfKey),
    Punctured(PuncturedPrfKey),
}

impl AnyPrfKey {
    pub fn domain(&self) -> u64 {
        match self {
            AnyPrfKey::Full(k) => k.domain(),
            AnyPrfKey::Punctured(k) => k.domain(),
        }
    }

    pub fn lambda_bits(&self) -> u32 {
        match self {
            AnyPrfKey::Full(k) => k.shape().lambda_bits,
            AnyPrfKey::Punctured(k) => k.shape().lambda_bits,
        }
    }

    pub fn value(&self, x: u64) -> Result<Option<PrfValue>> {
        match self {
            AnyPrfKey::Full(k) => k.eval_value(x).map(Some),
            AnyPrfKey::Punctured(k) => k.eval_value(x),
        }
    }

    pub fn index(&self, x: u64) -> Result<Option<u64>> {
        match self {
            AnyPrfKey::Full(k) => k.eval(x).map(Some),
            AnyPrfKey::Punctured(k) => k.eval(x),
        }
    }

    pub fn range(&self) -> Result<u64> {
        match self {
            AnyPrfKey::Full(k) => k.range(),
            AnyPrfKey::Punctured(k) => k.range(),
        }
    }
}

impl From<PrfKey> for AnyPrfKey {
    fn from(k: PrfKey) -> Self {
        AnyPrfKey::Full(k)
    }
}

impl From<PuncturedPrfKey> for AnyPrfKey {
    fn from(k: PuncturedPrfKey) -> Self {
        AnyPrfKey::Punctured(k)
    }
}

/// The program variants. Each carries exactly the values its figure hardcodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum ProgramDescriptor {
    #[serde(rename = "SC-P")]
    ScP { prf_sk: PrfKey, prf_enc: PrfKey },
    #[serde(rename = "SC-P1")]
    ScP1 {
        prf_sk: PuncturedPrfKey,
        prf_enc: PrfKey,
        i_star: u64,
        x_star: Bytes,
    },
    #[serde(rename = "SC-P2")]
    ScP2 {
        prf_sk: PuncturedPrfKey,
        prf_enc: PrfKey,
        i_star: u64,
    },
    #[serde(rename = "SC-P3")]
    ScP3 {
        prf_sk: PuncturedPrfKey,
        prf_enc: PuncturedPrfKey,
        i_star: u64,
        c0: u64,
        b0: u8,
        c1: u64,
        b1: u8,
    },
    #[serde(rename = "SC-P4")]
    ScP4 {
        prf_sk: PuncturedPrfKey,
        prf_enc: PuncturedPrfKey,
        i_star: u64,
        c0: u64,
        c1: u64,
    },
    #[serde(rename = "SK-P")]
    SkP { j: u64, prf_sk: PrfKey, prf_enc: PrfKey },
    #[serde(rename = "SK-P1")]
    SkP1 {
        i_star: u64,
        b0: u8,
        s_star: u64,
        prf_sk: PuncturedPrfKey,
        prf_enc: PrfKey,
    },
    #[serde(rename = "SK-P2")]
    SkP2 {
        i_star: u64,
        b0: u8,
        s_tilde: u64,
        prf_sk: PuncturedPrfKey,
        prf_enc: PrfKey,
    },
    #[serde(rename = "SK-P3")]
    SkP3 {
        i_star: u64,
        b0: u8,
        s_tilde: u64,
        prf_sk: PuncturedPrfKey,
        prf_enc: PuncturedPrfKey,
    },
    /// Same shape as `SK-P3`; `prf_enc` was sampled with `PRF_Enc(i*, s̃) = 1 - b0`.
    #[serde(rename = "SK-P4")]
    SkP4 {
        i_star: u64,
        b0: u8,
        s_tilde: u64,
        prf_sk: PuncturedPrfKey,
        prf_enc: PuncturedPrfKey,
    },
    #[serde(rename = "SK-P5")]
    SkP5 {
        i_star: u64,
        prf_sk: PuncturedPrfKey,
        prf_enc: PrfKey,
    },
    /// Same shape as `SK-P5`; `prf_enc` is unconditioned.
    #[serde(rename = "SK-P6")]
    SkP6 {
        i_star: u64,
        prf_sk: PuncturedPrfKey,
        prf_enc: PrfKey,
    },
}

/// Which input signature a program takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    ShortCtext,
    ShortKey,
}

/// Input-space dimensions read off a descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub family: Family,
    pub n: u64,
    pub m: u64,
    pub lambda_bits: u32,
}

fn bit_of(v: Option<u64>) -> Output {
    match v {
        Some(0) => Output::Zero,
        Some(_) => Output::One,
        None => Output::Bottom,
    }
}

impl ProgramDescriptor {
    pub fn variant_name(&self) -> &'static str {
        use ProgramDescriptor::*;
        match self {
            ScP { .. } => "SC-P",
            ScP1 { .. } => "SC-P1",
            ScP2 { .. } => "SC-P2",
            ScP3 { .. } => "SC-P3",
            ScP4 { .. } => "SC-P4",
            SkP { .. } => "SK-P",
            SkP1 { .. } => "SK-P1",
            SkP2 { .. } => "SK-P2",
            SkP3 { .. } => "SK-P3",
            SkP4 { .. } => "SK-P4",
            SkP5 { .. } => "SK-P5",
            SkP6 { .. } => "SK-P6",
        }
    }

    pub fn family(&self) -> Family {
        if self.variant_name().starts_with("SC") {
            Family::ShortCtext
        } else {
            Family::ShortKey
        }
    }

    fn keys(&self) -> (AnyPrfKey, AnyPrfKey) {
        use ProgramDescriptor::*;
        match self.clone() {
            ScP { prf_sk, prf_enc } | SkP { prf_sk, prf_enc, .. } => (prf_sk.into(), prf_enc.into()),
            ScP1 { prf_sk, prf_enc, .. }
            | ScP2 { prf_sk, prf_enc, .. }
            | SkP1 { prf_sk, prf_enc, .. }
            | SkP2 { prf_sk, prf_enc, .. }
            | SkP5 { prf_sk, prf_enc, .. }
            | SkP6 { prf_sk, prf_enc, .. } => (prf_sk.into(), prf_enc.into()),
            ScP3 { prf_sk, prf_enc, .. }
            | ScP4 { prf_sk, prf_enc, .. }
            | SkP3 { prf_sk, prf_enc, .. }
            | SkP4 { prf_sk, prf_enc, .. } => (prf_sk.into(), prf_enc.into()),
        }
    }

    /// Dimensions of the input space: `n` users, `m` ciphertexts (short-ctext) or
    /// secrets per user (short-key), and λ.
    pub fn signature(&self) -> Result<Signature> {
        let (sk, enc) = self.keys();
        let family = self.family();
        let n = sk.domain();
        let m = match family {
            Family::ShortCtext => enc.domain(),
            Family::ShortKey => sk.range()?,
        };
        Ok(Signature {
            family,
            n,
            m,
            lambda_bits: sk.lambda_bits(),
        })
    }

    /// Runs the program on one input.
    pub fn evaluate(&self, input: &ProgramInput) -> Result<Output> {
        let sig = self.signature()?;
        match (sig.family, input) {
            (Family::ShortCtext, ProgramInput::Sc { c, i, s }) => {
                check_sc_input(&sig, *c, *i, &s.0)?;
                self.eval_sc(*c, *i, &s.0)
            }
            (Family::ShortKey, ProgramInput::Sk { i, s }) => {
                check_sk_input(&sig, *i, *s)?;
                self.eval_sk(&sig, *i, *s)
            }
            _ => Err(Error::param(format!(
                "{} cannot take input {input}",
                self.variant_name()
            ))),
        }
    }

    fn eval_sc(&self, c: u64, i: u64, s: &[u8]) -> Result<Output> {
        use ProgramDescriptor::*;
        let prg_s = prg_raw(s);
        // PRG(s) ≠ PRG(PRF_sk(i)); a punctured PRF_sk at i counts as a mismatch.
        let guard = |prf_sk: &AnyPrfKey| -> Result<bool> {
            Ok(match prf_sk.value(i - 1)? {
                Some(PrfValue::Bits(si)) => prg_raw(&si) != prg_s,
                Some(PrfValue::Index(_)) => {
                    return Err(Error::param("short-ctext PRF_sk must have a bit-string codomain"))
                }
                None => true,
            })
        };
        let le = |bound: Option<u64>| match bound {
            Some(j) => Output::bit(i <= j),
            None => Output::Bottom,
        };
        match self {
            ScP { prf_sk, prf_enc } => {
                if guard(&prf_sk.clone().into())? {
                    return Ok(Output::Bottom);
                }
                Ok(Output::bit(i <= prf_enc.eval(c)?))
            }
            ScP1 {
                prf_sk,
                prf_enc,
                i_star,
                x_star,
            } => {
                if i == *i_star && prg_s != x_star.0 {
                    return Ok(Output::Bottom);
                }
                if i != *i_star && guard(&prf_sk.clone().into())? {
                    return Ok(Output::Bottom);
                }
                Ok(Output::bit(i <= prf_enc.eval(c)?))
            }
            ScP2 {
                prf_sk,
                prf_enc,
                i_star,
            } => {
                if i == *i_star {
                    return Ok(Output::Bottom);
                }
                if guard(&prf_sk.clone().into())? {
                    return Ok(Output::Bottom);
                }
                Ok(Output::bit(i <= prf_enc.eval(c)?))
            }
            ScP3 {
                prf_sk,
                prf_enc,
                i_star,
                c0,
                b0,
                c1,
                b1,
            } => {
                if i == *i_star {
                    return Ok(Output::Bottom);
                }
                if guard(&prf_sk.clone().into())? {
                    return Ok(Output::Bottom);
                }
                if c == *c0 {
                    return Ok(Output::bit(i + u64::from(*b0) <= *i_star));
                }
                if c == *c1 {
                    return Ok(Output::bit(i + u64::from(*b1) <= *i_star));
                }
                Ok(le(prf_enc.eval(c)?))
            }
            ScP4 {
                prf_sk,
                prf_enc,
                i_star,
                c0,
                c1,
            } => {
                if i == *i_star {
                    return Ok(Output::Bottom);
                }
                if guard(&prf_sk.clone().into())? {
                    return Ok(Output::Bottom);
                }
                if c == *c0 || c == *c1 {
                    return Ok(Output::bit(i <= *i_star));
                }
                Ok(le(prf_enc.eval(c)?))
            }
            _ => unreachable!("short-key variant in short-ctext evaluation"),
        }
    }

    fn eval_sk(&self, sig: &Signature, i: u64, s: u64) -> Result<Output> {
        use ProgramDescriptor::*;
        let x = (i - 1) * sig.m + s;
        let enc_full = |k: &PrfKey| k.eval(x).map(Some);
        let enc_punc = |k: &PuncturedPrfKey| k.eval(x);
        match self {
            SkP { j, prf_sk, prf_enc } => {
                if s != prf_sk.eval(i - 1)? {
                    return Ok(bit_of(enc_full(prf_enc)?));
                }
                Ok(Output::bit(i <= *j))
            }
            SkP1 {
                i_star,
                b0,
                s_star: hidden,
                prf_sk,
                prf_enc,
            }
            | SkP2 {
                i_star,
                b0,
                s_tilde: hidden,
                prf_sk,
                prf_enc,
            } => {
                if i == *i_star {
                    if s != *hidden {
                        return Ok(bit_of(enc_full(prf_enc)?));
                    }
                    return Ok(Output::bit(*b0 == 0));
                }
                if Some(s) != prf_sk.eval(i - 1)? {
                    return Ok(bit_of(enc_full(prf_enc)?));
                }
                Ok(Output::bit(i < *i_star))
            }
            SkP3 {
                i_star,
                b0,
                s_tilde,
                prf_sk,
                prf_enc,
            }
            | SkP4 {
                i_star,
                b0,
                s_tilde,
                prf_sk,
                prf_enc,
            } => {
                if i == *i_star {
                    if s != *s_tilde {
                        return Ok(bit_of(enc_punc(prf_enc)?));
                    }
                    return Ok(Output::bit(*b0 == 0));
                }
                if Some(s) != prf_sk.eval(i - 1)? {
                    return Ok(bit_of(enc_punc(prf_enc)?));
                }
                Ok(Output::bit(i < *i_star))
            }
            SkP5 {
                i_star,
                prf_sk,
                prf_enc,
            }
            | SkP6 {
                i_star,
                prf_sk,
                prf_enc,
            } => {
                if i == *i_star {
                    return Ok(bit_of(enc_full(prf_enc)?));
                }
                if Some(s) != prf_sk.eval(i - 1)? {
                    return Ok(bit_of(enc_full(prf_enc)?));
                }
                Ok(Output::bit(i < *i_star))
            }
            _ => unreachable!("short-ctext variant in short-key evaluation"),
        }
    }
}

fn check_sc_input(sig: &Signature, c: u64, i: u64, s: &[u8]) -> Result<()> {
    if c >= sig.m {
        return Err(Error::param(format!("ciphertext {c} out of [0, {})", sig.m)));
    }
    if i == 0 || i > sig.n {
        return Err(Error::param(format!("user {i} out of 1..={}", sig.n)));
    }
    let want = sig.lambda_bits as usize / 16;
    if s.len() != want {
        return Err(Error::param(format!(
            "secret has {} bytes, expected {want}",
            s.len()
        )));
    }
    Ok(())
}

fn check_sk_input(sig: &Signature, i: u64, s: u64) -> Result<()> {
    if i == 0 || i > sig.n {
        return Err(Error::param(format!("user {i} out of 1..={}", sig.n)));
    }
    if s >= sig.m {
        return Err(Error::param(format!("secret {s} out of [0, {})", sig.m)));
    }
    Ok(())
}
