//! Index-hiding adversaries. An adversary sees every key except `sk_{i*}` and
//! builds a decoder; the decoder guesses from the challenge ciphertext(s).

use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::obf::ProgramDescriptor;
use crate::schemes::{decrypt, Ciphertext, SchemeKind, UserKey};

/// What the adversary is given.
#[derive(Debug, Clone)]
pub struct AdversaryView<'a> {
    pub scheme: SchemeKind,
    pub n: u64,
    pub m: u64,
    pub i_star: u64,
    /// `sk_{-i*}`, ascending by index.
    pub keys: &'a [UserKey],
}

#[derive(Debug, Clone, Copy)]
pub enum Challenge<'a> {
    Single(&'a Ciphertext),
    Pair(&'a Ciphertext, &'a Ciphertext),
}

/// A pirate decoder.
pub trait Decoder {
    fn guess(&self, challenge: Challenge<'_>, rng: &mut ChaCha20Rng) -> Result<u8>;
}

pub trait Adversary: Send + Sync {
    fn name(&self) -> String;
    fn build<'a>(&self, view: &AdversaryView<'a>) -> Result<Box<dyn Decoder + 'a>>;
}

/// Always answers the same bit.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub u8);

impl Adversary for Constant {
    fn name(&self) -> String {
        format!("constant-{}", self.0)
    }

    fn build<'a>(&self, _view: &AdversaryView<'a>) -> Result<Box<dyn Decoder + 'a>> {
        Ok(Box::new(*self))
    }
}

impl Decoder for Constant {
    fn guess(&self, _c: Challenge<'_>, _rng: &mut ChaCha20Rng) -> Result<u8> {
        Ok(self.0)
    }
}

/// Decrypts the challenge with every held key and counts ones. An honest
/// ciphertext to `j` gets `|{i ≤ j, i ≠ i*}|` ones, which is `i* - 1` for both
/// `j = i*` and `j = i* - 1`; in that case the guess is a coin flip.
#[derive(Debug, Clone, Copy)]
pub struct BlackBoxDecrypt;

struct BlackBoxDecoder<'a> {
    keys: &'a [UserKey],
    i_star: u64,
}

impl BlackBoxDecoder<'_> {
    fn single(&self, c: &Ciphertext, rng: &mut ChaCha20Rng) -> Result<u8> {
        let mut ones = 0u64;
        for k in self.keys {
            if decrypt(k, c)?.as_bit() == Some(1) {
                ones += 1;
            }
        }
        let ambiguous = self.i_star - 1;
        Ok(match ones.cmp(&ambiguous) {
            std::cmp::Ordering::Less => 1,
            std::cmp::Ordering::Greater => 0,
            std::cmp::Ordering::Equal => rng.random_range(0..2),
        })
    }
}

impl Adversary for BlackBoxDecrypt {
    fn name(&self) -> String {
        "black-box-decrypt".into()
    }

    fn build<'a>(&self, view: &AdversaryView<'a>) -> Result<Box<dyn Decoder + 'a>> {
        Ok(Box::new(BlackBoxDecoder {
            keys: view.keys,
            i_star: view.i_star,
        }))
    }
}

impl Decoder for BlackBoxDecoder<'_> {
    fn guess(&self, ch: Challenge<'_>, rng: &mut ChaCha20Rng) -> Result<u8> {
        match ch {
            Challenge::Single(c) => self.single(c, rng),
            Challenge::Pair(c0, c1) => Ok(self.single(c0, rng)? ^ self.single(c1, rng)?),
        }
    }
}

/// Reads PRF keys and hardcoded bits straight out of transparent programs.
///
/// Short-ctext: the decryption program inside any held key exposes `PRF_Enc`
/// (or the hardcoded `b` values of the level-3 hybrid). Short-key: the
/// challenge ciphertext is itself the program. Where a hybrid carries no
/// information about the bit, or nothing is readable, it flips a coin.
#[derive(Debug, Clone, Copy)]
pub struct WhiteBoxTransparent;

struct WhiteBoxDecoder<'a> {
    i_star: u64,
    /// Program from a held short-ctext key.
    sc_program: Option<&'a ProgramDescriptor>,
}

/// The hidden bit `b = i* - j` as read from the programs, if readable.
fn read_bit(
    i_star: u64,
    sc_program: Option<&ProgramDescriptor>,
    c: &Ciphertext,
) -> Result<Option<u8>> {
    use ProgramDescriptor::*;
    let bit_from_j = |j: u64| u8::from(j + 1 == i_star);
    Ok(match c {
        Ciphertext::ShortCtext(c) => match sc_program {
            Some(ScP { prf_enc, .. }) | Some(ScP1 { prf_enc, .. }) | Some(ScP2 { prf_enc, .. }) => {
                Some(bit_from_j(prf_enc.eval(*c)?))
            }
            Some(ScP3 { prf_enc, c0, b0, c1, b1, .. }) => {
                if c == c0 {
                    Some(*b0)
                } else if c == c1 {
                    Some(*b1)
                } else {
                    prf_enc.eval(*c)?.map(bit_from_j)
                }
            }
            Some(ScP4 { prf_enc, c0, c1, .. }) => {
                if c == c0 || c == c1 {
                    None
                } else {
                    prf_enc.eval(*c)?.map(bit_from_j)
                }
            }
            _ => None,
        },
        Ciphertext::ShortKey(ct) => match ct.program.transparent_payload() {
            Some(SkP { j, .. }) => Some(bit_from_j(*j)),
            Some(SkP1 { b0, .. }) | Some(SkP2 { b0, .. }) | Some(SkP3 { b0, .. }) | Some(SkP4 { b0, .. }) => {
                Some(*b0)
            }
            _ => None,
        },
    })
}

impl WhiteBoxDecoder<'_> {
    fn single(&self, c: &Ciphertext, rng: &mut ChaCha20Rng) -> Result<u8> {
        match read_bit(self.i_star, self.sc_program, c)? {
            Some(b) => Ok(b),
            None => Ok(rng.random_range(0..2)),
        }
    }
}

fn held_sc_program<'a>(view: &AdversaryView<'a>) -> Option<&'a ProgramDescriptor> {
    view.keys.iter().find_map(|k| match k {
        UserKey::ShortCtext(k) => k.program.transparent_payload(),
        UserKey::ShortKey(_) => None,
    })
}

impl Adversary for WhiteBoxTransparent {
    fn name(&self) -> String {
        "white-box-transparent".into()
    }

    fn build<'a>(&self, view: &AdversaryView<'a>) -> Result<Box<dyn Decoder + 'a>> {
        Ok(Box::new(WhiteBoxDecoder {
            i_star: view.i_star,
            sc_program: held_sc_program(view),
        }))
    }
}

impl Decoder for WhiteBoxDecoder<'_> {
    fn guess(&self, ch: Challenge<'_>, rng: &mut ChaCha20Rng) -> Result<u8> {
        match ch {
            Challenge::Single(c) => self.single(c, rng),
            Challenge::Pair(c0, c1) => Ok(self.single(c0, rng)? ^ self.single(c1, rng)?),
        }
    }
}

/// A stateless decoder `S` with `Pr[S(c) = 1] = q_b` when `c` encrypts `i* - b`.
/// It learns `b` the white-box way, so it needs the transparent backend.
/// The single-challenge guess is `1 - S(c)`, the pair guess `S(c0) ⊕ S(c1)`.
#[derive(Debug, Clone, Copy)]
pub struct Synthetic {
    pub q0: f64,
    pub q1: f64,
}

impl Synthetic {
    pub fn new(q0: f64, q1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q0) || !(0.0..=1.0).contains(&q1) {
            return Err(Error::param(format!("acceptance probabilities ({q0}, {q1}) not in [0, 1]")));
        }
        Ok(Synthetic { q0, q1 })
    }
}

struct SyntheticDecoder<'a> {
    q: [f64; 2],
    inner: WhiteBoxDecoder<'a>,
}

impl SyntheticDecoder<'_> {
    fn s(&self, c: &Ciphertext, rng: &mut ChaCha20Rng) -> Result<u8> {
        let b = match read_bit(self.inner.i_star, self.inner.sc_program, c)? {
            Some(b) => b,
            None => return Err(Error::Configuration("synthetic decoder cannot read the challenge index".into())),
        };
        Ok(u8::from(rng.random_bool(self.q[b as usize])))
    }
}

impl Adversary for Synthetic {
    fn name(&self) -> String {
        format!("synthetic-{}-{}", self.q0, self.q1)
    }

    fn build<'a>(&self, view: &AdversaryView<'a>) -> Result<Box<dyn Decoder + 'a>> {
        Ok(Box::new(SyntheticDecoder {
            q: [self.q0, self.q1],
            inner: WhiteBoxDecoder {
                i_star: view.i_star,
                sc_program: held_sc_program(view),
            },
        }))
    }
}

impl Decoder for SyntheticDecoder<'_> {
    fn guess(&self, ch: Challenge<'_>, rng: &mut ChaCha20Rng) -> Result<u8> {
        match ch {
            Challenge::Single(c) => Ok(1 - self.s(c, rng)?),
            Challenge::Pair(c0, c1) => Ok(self.s(c0, rng)? ^ self.s(c1, rng)?),
        }
    }
}

/// Adversary selected by name: `constant`, `constant-0`, `constant-1`,
/// `black-box-decrypt`, `white-box-transparent`, or `synthetic-<q0>-<q1>`.
pub fn adversary_by_name(name: &str) -> Result<Box<dyn Adversary>> {
    Ok(match name {
        "constant" | "constant-0" => Box::new(Constant(0)),
        "constant-1" => Box::new(Constant(1)),
        "black-box-decrypt" => Box::new(BlackBoxDecrypt),
        "white-box-transparent" => Box::new(WhiteBoxTransparent),
        _ => {
            let parsed = name.strip_prefix("synthetic-").and_then(|rest| {
                let (a, b) = rest.split_once('-')?;
                Some((f64::from_str(a).ok()?, f64::from_str(b).ok()?))
            });
            match parsed {
                Some((q0, q1)) => Box::new(Synthetic::new(q0, q1)?),
                None => return Err(Error::Configuration(format!("unknown adversary {name:?}"))),
            }
        }
    })
}
