//! Serialization helpers: exact rationals as `{"num": "…", "den": "…"}` and
//! floats as shortest round-trip decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

#[derive(Serialize)]
struct RatioJson {
    num: String,
    den: String,
}

pub fn ratio<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    RatioJson {
        num: r.numer().to_string(),
        den: r.denom().to_string(),
    }
    .serialize(s)
}

pub fn opt_ratio<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => ratio(r, s),
        None => s.serialize_none(),
    }
}

pub fn ratios<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<RatioJson> = v
        .iter()
        .map(|r| RatioJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        })
        .collect();
    v.serialize(s)
}

/// A map of rationals keyed by index.
pub fn ratio_map<S: Serializer>(m: &BTreeMap<u64, BigRational>, s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, r) in m {
        map.serialize_entry(
            k,
            &RatioJson {
                num: r.numer().to_string(),
                den: r.denom().to_string(),
            },
        )?;
    }
    map.end()
}

/// A map of floats keyed by index, values as decimal strings.
pub fn decimal_map<S: Serializer>(m: &BTreeMap<u64, f64>, s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, x) in m {
        map.serialize_entry(k, &decimal_string(*x))?;
    }
    map.end()
}

pub fn decimal<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&decimal_string(*x))
}

pub fn opt_decimal<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => decimal(x, s),
        None => s.serialize_none(),
    }
}

pub fn decimals<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    v.iter().map(|x| decimal_string(*x)).collect::<Vec<_>>().serialize(s)
}

/// Shortest string that parses back to `x`; `inf`, `-inf` and `nan` spelled out.
pub fn decimal_string(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

/// `num/den` as an exact rational.
pub fn frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_decimals() {
        assert_eq!(decimal_string(0.1), "0.1");
        assert_eq!(decimal_string(-0.0), "0");
        assert_eq!(decimal_string(1.0), "1");
        assert_eq!(decimal_string(f64::INFINITY), "inf");
    }

    #[test]
    fn ratio_layout() {
        #[derive(Serialize)]
        struct W(#[serde(serialize_with = "ratio")] BigRational);
        let j = serde_json::to_string(&W(frac(6, -4))).unwrap();
        assert_eq!(j, r#"{"num":"-3","den":"2"}"#);
    }
}
