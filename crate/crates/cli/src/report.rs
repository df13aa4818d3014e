//! The report envelope shared by every command.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const SEED_DERIVATION: &str =
    "SHA-256 over the master seed and the length-prefixed, type-tagged label path; per-command root label is the command name";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Complete,
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Fail => 1,
            _ => 0,
        }
    }
}

/// What a command hands back to the dispatcher.
pub struct Outcome {
    pub status: Status,
    pub results: Value,
    /// Named formulas behind derived numbers in `config` and `results`.
    pub formulas: BTreeMap<&'static str, String>,
    /// One line for the terminal.
    pub summary: String,
    /// Measured durations in milliseconds; reported only on request.
    pub timings: BTreeMap<String, f64>,
}

impl Outcome {
    pub fn new(status: Status, results: impl Serialize, summary: String) -> Result<Self, CliError> {
        Ok(Outcome {
            status,
            results: serde_json::to_value(results)?,
            formulas: BTreeMap::new(),
            summary,
            timings: BTreeMap::new(),
        })
    }

    pub fn formula(mut self, name: &'static str, text: impl Into<String>) -> Self {
        self.formulas.insert(name, text.into());
        self
    }
}

#[derive(Serialize)]
struct Provenance<'a> {
    seed_derivation: &'static str,
    formulas: &'a BTreeMap<&'static str, String>,
    generator: String,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    command: &'a str,
    status: Status,
    config: &'a Value,
    results: &'a Value,
    provenance: Provenance<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<BTreeMap<String, f64>>,
}

/// Pretty JSON with a trailing newline. Field order is fixed by the structs,
/// so identical inputs give identical bytes.
pub fn render(
    command: &str,
    config: &Value,
    outcome: &Outcome,
    timings: Option<BTreeMap<String, f64>>,
) -> Result<String, CliError> {
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command,
        status: outcome.status,
        config,
        results: &outcome.results,
        provenance: Provenance {
            seed_derivation: SEED_DERIVATION,
            formulas: &outcome.formulas,
            generator: format!("weak-tt {}", env!("CARGO_PKG_VERSION")),
        },
        timings,
    };
    let mut s = serde_json::to_string_pretty(&report)?;
    s.push('\n');
    Ok(s)
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

/// `{"num": …, "den": …}` as a JSON value.
pub fn ratio_value(r: &num_rational::BigRational) -> Value {
    serde_json::json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}
