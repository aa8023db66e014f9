//! Extended rationals: exact rationals plus a single positive infinity.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A value in ℚ ∪ {∞}. Every finite value compares below `Inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtValue {
    Fin(BigRational),
    Inf,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ExtValue {
    pub fn zero() -> Self {
        ExtValue::Fin(BigRational::zero())
    }

    pub fn one() -> Self {
        ExtValue::Fin(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        ExtValue::Fin(int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        ExtValue::Fin(rat(n, d))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, ExtValue::Inf)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_inf()
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExtValue::Fin(q) => Some(q),
            ExtValue::Inf => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtValue::Fin(q) if q.is_zero())
    }

    /// `c · self` for `c ≥ 0`, with `0 · ∞ = ∞`.
    pub fn scaled(&self, c: &BigRational) -> Self {
        debug_assert!(!c.is_negative());
        match self {
            ExtValue::Fin(q) => ExtValue::Fin(q * c),
            ExtValue::Inf => ExtValue::Inf,
        }
    }

    /// Adds a rational constant; infinity absorbs it.
    pub fn shifted(&self, c: &BigRational) -> Self {
        match self {
            ExtValue::Fin(q) => ExtValue::Fin(q + c),
            ExtValue::Inf => ExtValue::Inf,
        }
    }
}

impl Add for &ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: &ExtValue) -> ExtValue {
        match (self, rhs) {
            (ExtValue::Fin(a), ExtValue::Fin(b)) => ExtValue::Fin(a + b),
            _ => ExtValue::Inf,
        }
    }
}

impl Add for ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: ExtValue) -> ExtValue {
        &self + &rhs
    }
}

impl From<BigRational> for ExtValue {
    fn from(q: BigRational) -> Self {
        ExtValue::Fin(q)
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Fin(q) => f.write_str(&format_rational(q)),
            ExtValue::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "inf" | "INF" | "Inf" => Ok(ExtValue::Inf),
            other => parse_rational(other).map(ExtValue::Fin),
        }
    }
}

impl Serialize for ExtValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for rationals written as `"p/q"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs() {
        let a = ExtValue::from_int(3);
        assert_eq!(&a + &ExtValue::Inf, ExtValue::Inf);
        assert_eq!(ExtValue::Inf.scaled(&int(0)), ExtValue::Inf);
        assert_eq!(a.scaled(&int(0)), ExtValue::zero());
        assert!(ExtValue::from_int(1_000_000) < ExtValue::Inf);
    }

    #[test]
    fn lowest_terms_round_trip() {
        let v: ExtValue = "6/-4".parse().unwrap();
        assert_eq!(v.to_string(), "-3/2");
        assert_eq!("inf".parse::<ExtValue>().unwrap(), ExtValue::Inf);
        assert_eq!("7".parse::<ExtValue>().unwrap(), ExtValue::from_int(7));
        assert!("1/0".parse::<ExtValue>().is_err());
        let json = serde_json::to_string(&ExtValue::from_ratio(5, 3)).unwrap();
        assert_eq!(json, "\"5/3\"");
    }
}
