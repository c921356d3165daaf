//! Serde helpers: exact rationals travel as `"p/q"` strings.

use serde::ser::SerializeSeq;
use serde::Serializer;

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational};
use crate::{RVector, Rational};

pub fn ser_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub fn ser_rvector<S: Serializer>(v: &RVector, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.dim()))?;
    for e in v.entries() {
        seq.serialize_element(&format_rational(e))?;
    }
    seq.end()
}

pub fn ser_rvectors<S: Serializer>(vs: &[RVector], s: S) -> Result<S::Ok, S::Error> {
    let strings: Vec<Vec<String>> = vs.iter().map(rvector_strings).collect();
    s.collect_seq(strings)
}

pub fn rvector_strings(v: &RVector) -> Vec<String> {
    v.entries().iter().map(format_rational).collect()
}

pub fn parse_rational_str(s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| Error::Parse(format!("not a rational: `{s}`")))
}

pub fn parse_rvector(entries: &[String]) -> Result<RVector> {
    Ok(RVector::new(
        entries.iter().map(|e| parse_rational_str(e)).collect::<Result<_>>()?,
    ))
}

/// Comma-separated rationals, e.g. `"1/3,1/4"`.
pub fn parse_rvector_list(s: &str) -> Result<RVector> {
    let parts: Vec<String> = s.split(',').map(|p| p.trim().to_string()).collect();
    parse_rvector(&parts)
}

/// `#[serde(with = "crate::io::rational_str")]` for a `Rational` field.
pub mod rational_str {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        super::ser_rational(r, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational_str(&s).map_err(de::Error::custom)
    }
}
