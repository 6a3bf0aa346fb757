//! Points of the instance space and their labels.
//!
//! Points on the unit interval are exact rationals so that the nested
//! subdivisions built by the lower-bound adversary keep their strict
//! orderings at any depth.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{structural, Result};

/// Exact rational number.
pub type Rational = BigRational;

/// Builds `num/den` as an exact rational.
///
/// # Panics
///
/// Panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|e| structural(format!("bad numerator {num:?}: {e}")))?;
    let den = BigInt::from_str(den).map_err(|e| structural(format!("bad denominator {den:?}: {e}")))?;
    if den.is_zero() {
        return Err(structural("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Formats a rational as `num/den` (always with the slash, reduced form).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// An element of the instance space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Example {
    /// A point of the closed unit interval.
    Point(Rational),
    /// The distinguished element every threshold labels 0.
    Star,
    /// An abstract domain element, used by finite tables.
    Atom(u64),
}

impl Example {
    /// Checked constructor for unit-interval points.
    pub fn point(value: Rational) -> Result<Self> {
        if value < Rational::zero() || value > Rational::one() {
            return Err(structural(format!(
                "point {} lies outside [0, 1]",
                format_rational(&value)
            )));
        }
        Ok(Example::Point(value))
    }

    /// Shorthand for `Example::point(ratio(num, den))`.
    pub fn frac(num: i64, den: i64) -> Result<Self> {
        Example::point(ratio(num, den))
    }

    pub fn as_point(&self) -> Option<&Rational> {
        match self {
            Example::Point(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_star(&self) -> bool {
        matches!(self, Example::Star)
    }

    /// Stable byte encoding, used for digests.
    pub(crate) fn write_bytes(&self, out: &mut Vec<u8>) {
        match self {
            Example::Point(q) => {
                out.push(b'p');
                out.extend_from_slice(format_rational(q).as_bytes());
            }
            Example::Star => out.push(b's'),
            Example::Atom(k) => {
                out.push(b'a');
                out.extend_from_slice(&k.to_le_bytes());
            }
        }
        out.push(0);
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Example::Point(q) => write!(f, "{}", format_rational(q)),
            Example::Star => write!(f, "star"),
            Example::Atom(k) => write!(f, "atom:{k}"),
        }
    }
}

impl Serialize for Example {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(1))?;
        match self {
            Example::Point(q) => map.serialize_entry("point", &format_rational(q))?,
            Example::Star => map.serialize_entry("star", &true)?,
            Example::Atom(k) => map.serialize_entry("atom", k)?,
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Example {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            point: Option<String>,
            star: Option<bool>,
            atom: Option<u64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        match (raw.point, raw.star, raw.atom) {
            (Some(p), None, None) => {
                let q = parse_rational(&p).map_err(de::Error::custom)?;
                Example::point(q).map_err(de::Error::custom)
            }
            (None, Some(true), None) => Ok(Example::Star),
            (None, None, Some(k)) => Ok(Example::Atom(k)),
            _ => Err(de::Error::custom(
                "example must be exactly one of {\"point\": \"n/d\"}, {\"star\": true}, {\"atom\": k}",
            )),
        }
    }
}

/// A class label. Binary experiments use 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub u32);

impl Label {
    pub const ZERO: Label = Label(0);
    pub const ONE: Label = Label(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<bool> for Label {
    fn from(b: bool) -> Self {
        Label(b as u32)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A labeled stream `(x_1, y_1), ..., (x_T, y_T)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledStream {
    items: Vec<(Example, Label)>,
}

impl LabeledStream {
    pub fn new(items: Vec<(Example, Label)>) -> Result<Self> {
        if items.is_empty() {
            return Err(structural("a labeled stream needs a positive horizon"));
        }
        Ok(Self { items })
    }

    pub fn from_parts(examples: Vec<Example>, labels: Vec<Label>) -> Result<Self> {
        if examples.len() != labels.len() {
            return Err(structural(format!(
                "{} examples but {} labels",
                examples.len(),
                labels.len()
            )));
        }
        Self::new(examples.into_iter().zip(labels).collect())
    }

    pub fn horizon(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[(Example, Label)] {
        &self.items
    }

    pub fn examples(&self) -> Vec<Example> {
        self.items.iter().map(|(x, _)| x.clone()).collect()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.items.iter().map(|(_, y)| *y).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_outside_unit_interval_are_rejected() {
        assert!(Example::frac(3, 2).is_err());
        assert!(Example::frac(-1, 4).is_err());
        assert!(Example::frac(0, 1).is_ok());
        assert!(Example::frac(1, 1).is_ok());
    }

    #[test]
    fn equality_is_exact() {
        assert_eq!(Example::frac(2, 4).unwrap(), Example::frac(1, 2).unwrap());
        assert_ne!(Example::frac(1, 3).unwrap(), Example::frac(333, 1000).unwrap());
    }

    #[test]
    fn json_forms() {
        let xs = vec![Example::frac(1, 4).unwrap(), Example::Star, Example::Atom(7)];
        let s = serde_json::to_string(&xs).unwrap();
        assert_eq!(s, r#"[{"point":"1/4"},{"star":true},{"atom":7}]"#);
        let back: Vec<Example> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xs);
        assert!(serde_json::from_str::<Example>(r#"{"point":"5/4"}"#).is_err());
        assert!(serde_json::from_str::<Example>(r#"{"star":true,"atom":1}"#).is_err());
    }

    #[test]
    fn stream_lengths_must_match() {
        assert!(LabeledStream::from_parts(vec![Example::Star], vec![]).is_err());
        assert!(LabeledStream::new(vec![]).is_err());
    }
}
