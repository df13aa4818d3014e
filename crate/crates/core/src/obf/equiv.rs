//! Exhaustive functional-equivalence checking over small input spaces.

use rayon::prelude::*;
use serde::Serialize;

use super::descriptor::{Family, Output, ProgramDescriptor, ProgramInput, Signature};
use crate::error::{Error, Result};
use crate::primitives::Bytes;

/// Largest input space the checker will enumerate.
pub const MAX_INPUTS: u64 = 1 << 24;

/// Which secrets `s` to range over for short-ctext programs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SecretValues {
    /// Every byte string of this length.
    Full { bytes: usize },
    /// An explicit candidate list (sorted and deduplicated on use).
    Listed(Vec<Vec<u8>>),
}

/// The joint input space of two programs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSpace {
    Sc { m: u64, n: u64, secrets: SecretValues },
    Sk { n: u64, m: u64 },
}

impl InputSpace {
    /// Every input of the signature.
    pub fn full(sig: &Signature) -> Self {
        match sig.family {
            Family::ShortCtext => InputSpace::Sc {
                m: sig.m,
                n: sig.n,
                secrets: SecretValues::Full {
                    bytes: sig.lambda_bits as usize / 16,
                },
            },
            Family::ShortKey => InputSpace::Sk { n: sig.n, m: sig.m },
        }
    }

    /// Short-ctext space with `s` restricted to `secrets`.
    pub fn sc_listed(sig: &Signature, secrets: Vec<Vec<u8>>) -> Self {
        InputSpace::Sc {
            m: sig.m,
            n: sig.n,
            secrets: SecretValues::Listed(secrets),
        }
    }

    /// Number of inputs, saturating.
    pub fn size(&self) -> u64 {
        match self {
            InputSpace::Sc { m, n, secrets } => {
                let s = match secrets {
                    SecretValues::Full { bytes } => {
                        if *bytes >= 8 {
                            u64::MAX
                        } else {
                            1u64 << (8 * bytes)
                        }
                    }
                    SecretValues::Listed(v) => v.len() as u64,
                };
                m.saturating_mul(*n).saturating_mul(s)
            }
            InputSpace::Sk { n, m } => n.saturating_mul(*m),
        }
    }

    fn secrets(&self) -> Vec<Vec<u8>> {
        match self {
            InputSpace::Sc {
                secrets: SecretValues::Full { bytes },
                ..
            } => (0..1u64 << (8 * bytes))
                .map(|v| v.to_be_bytes()[8 - bytes..].to_vec())
                .collect(),
            InputSpace::Sc {
                secrets: SecretValues::Listed(v),
                ..
            } => {
                let mut v = v.clone();
                v.sort();
                v.dedup();
                v
            }
            InputSpace::Sk { .. } => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub input: ProgramInput,
    pub left: Output,
    pub right: Output,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub space_size: u64,
    /// Lexicographically smallest disagreeing input.
    pub counterexample: Option<Counterexample>,
}

/// Compares `a` and `b` on every input of `space`, in lexicographic order.
pub fn programs_equivalent(
    a: &ProgramDescriptor,
    b: &ProgramDescriptor,
    space: &InputSpace,
) -> Result<Equivalence> {
    let (sa, sb) = (a.signature()?, b.signature()?);
    if sa != sb {
        return Err(Error::param(format!(
            "{} and {} have different input signatures",
            a.variant_name(),
            b.variant_name()
        )));
    }
    let size = space.size();
    if size > MAX_INPUTS {
        return Err(Error::Capacity(format!(
            "input space of {size} points exceeds the {MAX_INPUTS}-point budget"
        )));
    }

    let compare = |input: ProgramInput| -> Result<Option<Counterexample>> {
        let (left, right) = (a.evaluate(&input)?, b.evaluate(&input)?);
        Ok((left != right).then_some(Counterexample { input, left, right }))
    };

    // Outer coordinate in parallel, first hit in order.
    let found: Option<Result<Counterexample>> = match space {
        InputSpace::Sc { m, n, .. } => {
            let secrets = space.secrets();
            (0..*m).into_par_iter().find_map_first(|c| {
                for i in 1..=*n {
                    for s in &secrets {
                        let input = ProgramInput::Sc {
                            c,
                            i,
                            s: Bytes(s.clone()),
                        };
                        match compare(input) {
                            Ok(Some(cx)) => return Some(Ok(cx)),
                            Ok(None) => {}
                            Err(e) => return Some(Err(e)),
                        }
                    }
                }
                None
            })
        }
        InputSpace::Sk { n, m } => (1..=*n).into_par_iter().find_map_first(|i| {
            (0..*m).find_map(|s| compare(ProgramInput::Sk { i, s }).transpose())
        }),
    };

    match found {
        None => Ok(Equivalence {
            equivalent: true,
            space_size: size,
            counterexample: None,
        }),
        Some(Ok(cx)) => Ok(Equivalence {
            equivalent: false,
            space_size: size,
            counterexample: Some(cx),
        }),
        Some(Err(e)) => Err(e),
    }
}
