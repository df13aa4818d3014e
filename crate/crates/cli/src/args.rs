//! Argument groups shared by several commands.

use std::path::{Path, PathBuf};

use clap::Args;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use weak_tt::schemes::{SchemeKind, SchemeParams};

#[derive(Debug, Clone, Args, Serialize)]
pub struct SchemeArgs {
    /// short-ctext or short-key
    #[arg(long, default_value = "short-ctext", value_parser = parse_scheme)]
    pub scheme: SchemeKind,
    /// Number of users.
    #[arg(long, default_value_t = 4)]
    pub n: u64,
    /// Ciphertext-space (short-ctext) or per-user key-space (short-key) size.
    #[arg(long)]
    pub m: Option<u64>,
    /// Security parameter in bits.
    #[arg(long = "lambda", default_value_t = 64)]
    pub lambda_bits: u32,
}

/// How a command fills in `m` when it is not given.
#[derive(Debug, Clone, Copy)]
pub enum MDefault {
    /// The scheme's own size, `n^e · max(1, ⌈log₂ n⌉)²`.
    Scheme,
    /// `8n`, small enough for per-trial setups and exhaustive checks.
    Simulation,
    /// `max(n³, n + 1)`: a query family of size `n³`.
    Cubic,
}

impl SchemeArgs {
    pub fn resolve(&self, rule: MDefault) -> Result<(SchemeParams, String), CliError> {
        let n = self.n;
        let (m, formula) = match (self.m, rule) {
            (Some(m), _) => (Some(m), "m given on the command line".to_owned()),
            (None, MDefault::Scheme) => {
                let e = self.scheme.default_m_exponent();
                let formula = match self.scheme {
                    SchemeKind::ShortCtext => format!("m = max(n^{e} * max(1, ceil(log2 n))^2, n + 1)"),
                    SchemeKind::ShortKey => format!("m = max(n^{e} * max(1, ceil(log2 n))^2, 2)"),
                };
                (None, formula)
            }
            (None, MDefault::Simulation) => (Some(8 * n), "m = 8n (simulation size)".to_owned()),
            (None, MDefault::Cubic) => (
                Some(n.saturating_pow(3).max(n + 1)),
                "m = max(n^3, n + 1) (query family of size n^3)".to_owned(),
            ),
        };
        Ok((SchemeParams::new(self.scheme, self.lambda_bits, n, m)?, formula))
    }
}

pub fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    s.parse().map_err(|e: weak_tt::Error| e.to_string())
}

/// `a/b`, an integer, or a finite decimal, exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let bad = || format!("{s:?} is not a rational (use a/b or a decimal)");
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b == BigInt::from(0) {
            return Err(format!("{s:?} has a zero denominator"));
        }
        return Ok(BigRational::new(a, b));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = BigInt::from(10).pow(frac.len() as u32);
    let r = BigRational::new(digits, den);
    Ok(if neg { -r } else { r })
}



/// Reads a JSON file; a report's `results.<field>` is unwrapped when present.
pub fn read_json(path: &Path, field: &str) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let mut v: Value = serde_json::from_str(&text)?;
    if let Some(inner) = v.get_mut("results").and_then(|r| r.get_mut(field)) {
        return Ok(inner.take());
    }
    Ok(v)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PathArg {
    /// A report written by an earlier command, or the bare JSON object.
    #[arg(long)]
    pub system: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("3/4").unwrap(), r(3, 4));
        assert_eq!(parse_rational("0.1").unwrap(), r(1, 10));
        assert_eq!(parse_rational("-.5").unwrap(), r(-1, 2));
        assert_eq!(parse_rational("2").unwrap(), r(2, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1e-3").is_err());
        assert!(parse_rational(".").is_err());
    }
}
