//! Obfuscation interface and program descriptors.
//!
//! Only the `transparent` backend exists. It preserves functionality and hides
//! nothing: the descriptor, including every PRF key, is readable from the output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::RunSeed;

mod descriptor;
mod equiv;

pub use descriptor::{AnyPrfKey, Family, Output, ProgramDescriptor, ProgramInput, Signature};
pub use equiv::{
    programs_equivalent, Counterexample, Equivalence, InputSpace, SecretValues, MAX_INPUTS,
};

pub const TRANSPARENT: &str = "transparent";

/// Names accepted by [`obfuscate`].
pub const BACKENDS: &[&str] = &[TRANSPARENT];

/// Output of the obfuscator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObfuscatedProgram {
    pub backend: String,
    pub program: ProgramDescriptor,
}

impl ObfuscatedProgram {
    pub fn evaluate(&self, input: &ProgramInput) -> Result<Output> {
        match self.backend.as_str() {
            TRANSPARENT => self.program.evaluate(input),
            other => Err(Error::Configuration(format!("unknown obfuscation backend {other:?}"))),
        }
    }

    /// The descriptor, readable only because the backend is transparent.
    pub fn transparent_payload(&self) -> Option<&ProgramDescriptor> {
        (self.backend == TRANSPARENT).then_some(&self.program)
    }
}

/// `Obfuscate(λ, C)`. The seed is accepted for interface parity; the transparent
/// backend is deterministic and ignores it.
pub fn obfuscate(
    descriptor: ProgramDescriptor,
    backend: &str,
    _seed: &RunSeed,
) -> Result<ObfuscatedProgram> {
    if !BACKENDS.contains(&backend) {
        return Err(Error::Configuration(format!(
            "unknown obfuscation backend {backend:?}; available: {}",
            BACKENDS.join(", ")
        )));
    }
    Ok(ObfuscatedProgram {
        backend: backend.to_owned(),
        program: descriptor,
    })
}

/// Something that can be run as a program.
pub trait Evaluate {
    fn evaluate_program(&self, input: &ProgramInput) -> Result<Output>;
}

impl Evaluate for ProgramDescriptor {
    fn evaluate_program(&self, input: &ProgramInput) -> Result<Output> {
        self.evaluate(input)
    }
}

impl Evaluate for ObfuscatedProgram {
    fn evaluate_program(&self, input: &ProgramInput) -> Result<Output> {
        self.evaluate(input)
    }
}

pub fn evaluate_program(prog: &impl Evaluate, input: &ProgramInput) -> Result<Output> {
    prog.evaluate_program(input)
}
