//! Weak traitor tracing at desk scale: puncturable PRFs, a transparent
//! obfuscation interface, the short-ciphertext and short-key schemes, their
//! security games, and the tracing attack against accurate statistical-query
//! mechanisms.

pub mod dp;
pub mod error;
pub mod games;
pub mod json;
pub mod obf;
pub mod primitives;
pub mod schemes;
pub mod stats;

pub use error::{Error, Result};
