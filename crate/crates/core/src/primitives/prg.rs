//! Length-doubling PRG over the pinned counter-mode SHA-256 expansion.

use serde::{Deserialize, Serialize};

use super::{xof, Bytes};
use crate::error::{Error, Result};

const PRG_TAG: &[u8] = b"weak-tt/prg";

/// Checks that λ is a positive multiple of 16 bits.
pub fn check_lambda(lambda_bits: u32) -> Result<()> {
    if lambda_bits == 0 || !lambda_bits.is_multiple_of(16) {
        return Err(Error::param(format!(
            "lambda must be a positive multiple of 16 bits, got {lambda_bits}"
        )));
    }
    Ok(())
}

/// A PRG seed of exactly λ/2 bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrgSeed(Bytes);

impl PrgSeed {
    pub fn new(bytes: Vec<u8>, lambda_bits: u32) -> Result<Self> {
        check_lambda(lambda_bits)?;
        let want = (lambda_bits / 16) as usize;
        if bytes.len() != want {
            return Err(Error::param(format!(
                "PRG seed must be {want} bytes for lambda={lambda_bits}, got {}",
                bytes.len()
            )));
        }
        Ok(PrgSeed(Bytes(bytes)))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0 .0
    }
}

/// Doubles the length of `input`. GGM children are the two halves of this.
pub(crate) fn double(input: &[u8]) -> Vec<u8> {
    xof::expand(PRG_TAG, input, 2 * input.len())
}

/// `PRG : {0,1}^{λ/2} → {0,1}^λ`.
pub fn prg_expand(seed: &PrgSeed, lambda_bits: u32) -> Result<Vec<u8>> {
    check_lambda(lambda_bits)?;
    if seed.as_bytes().len() * 16 != lambda_bits as usize {
        return Err(Error::param(format!(
            "seed has {} bits, lambda={lambda_bits} needs {}",
            seed.as_bytes().len() * 8,
            lambda_bits / 2
        )));
    }
    Ok(double(seed.as_bytes()))
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::primitives::RunSeed;

    #[test]
    fn deterministic() {
        let s = PrgSeed::new(vec![1, 2, 3, 4], 64).unwrap();
        assert_eq!(prg_expand(&s, 64).unwrap(), prg_expand(&s, 64).unwrap());
        assert_eq!(prg_expand(&s, 64).unwrap().len(), 8);
    }

    #[test]
    fn output_length_lambda_128() {
        let s = PrgSeed::new(vec![0; 8], 128).unwrap();
        assert_eq!(prg_expand(&s, 128).unwrap().len(), 16);
    }

    #[test]
    fn length_mismatch_is_parameter_error() {
        assert!(PrgSeed::new(vec![0; 3], 64).is_err());
        assert!(check_lambda(24).is_err());
        assert!(check_lambda(0).is_err());
        let s = PrgSeed::new(vec![0; 4], 64).unwrap();
        assert!(matches!(prg_expand(&s, 128), Err(Error::Parameter(_))));
    }

    #[test]
    fn distinct_seeds_distinct_outputs() {
        let root = RunSeed::from_master(5);
        let mut seen = HashSet::new();
        for k in 0..1000u64 {
            let a = PrgSeed::new(root.derive("a").derive(k).bytes(4), 64).unwrap();
            let b = PrgSeed::new(root.derive("b").derive(k).bytes(4), 64).unwrap();
            if a == b {
                continue;
            }
            let (ya, yb) = (prg_expand(&a, 64).unwrap(), prg_expand(&b, 64).unwrap());
            assert_ne!(ya, yb);
            seen.insert(ya);
        }
        assert!(seen.len() > 990);
    }
}
