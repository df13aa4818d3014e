//! Seeded randomness, the PRG, and puncturable GGM PRFs.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

mod prf;
mod prg;
mod seed;
pub(crate) mod xof;

pub use prf::{
    accept_chunk, sample_conditioned_prf, sample_from_preimages, sample_surjective_prf,
    sample_uniform_preimage, Codomain, CopathEntry, PrfKey, PrfRole, PrfShape, PrfValue,
    PuncturedPrfKey, Sampled, DEFAULT_REJECTION_BUDGET,
};
pub use prg::{check_lambda, prg_expand, PrgSeed};
pub(crate) use prf::tree_depth;
pub(crate) use prg::double as prg_raw;
pub use seed::{seed_derive, Label, RunSeed};

/// Byte string that serializes as lowercase hex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bytes(pub Vec<u8>);

impl Serialize for Bytes {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(&self.0))
    }
}

impl<'de> Deserialize<'de> for Bytes {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(&s).map(Bytes).map_err(serde::de::Error::custom)
    }
}

impl From<Vec<u8>> for Bytes {
    fn from(v: Vec<u8>) -> Self {
        Bytes(v)
    }
}

impl AsRef<[u8]> for Bytes {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}
