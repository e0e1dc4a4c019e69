//! Exact values: rationals and the extended line `ℚ ∪ {−∞}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d`; panics on a zero denominator, so only use with literal inputs.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not an exact rational: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|q| q.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for `BTreeMap<u64, Rational>` with `"p/q"` values.
pub mod rational_map {
    use std::collections::BTreeMap;

    use super::*;

    pub fn serialize<S: Serializer>(m: &BTreeMap<u64, Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, q)| (k.to_string(), q.to_string())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<u64, Rational>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.iter()
            .map(|(k, v)| {
                let k = k.trim().parse::<u64>().map_err(serde::de::Error::custom)?;
                let v = parse_rational(v).map_err(serde::de::Error::custom)?;
                Ok((k, v))
            })
            .collect()
    }
}

/// A rational number or `−∞`. Potentials are bounded above, so `+∞` never occurs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtendedValue {
    NegInf,
    Finite(Rational),
}

impl ExtendedValue {
    pub fn zero() -> Self {
        ExtendedValue::Finite(Rational::zero())
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedValue::Finite(q) => Some(q),
            ExtendedValue::NegInf => None,
        }
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, ExtendedValue::NegInf)
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Multiplication by a non-negative rational; `0 · −∞ = 0` (measure-theoretic convention).
    pub fn scale(&self, w: &Rational) -> Self {
        debug_assert!(!w.is_negative());
        match self {
            ExtendedValue::Finite(q) => ExtendedValue::Finite(q * w),
            ExtendedValue::NegInf if w.is_zero() => ExtendedValue::zero(),
            ExtendedValue::NegInf => ExtendedValue::NegInf,
        }
    }
}

impl From<Rational> for ExtendedValue {
    fn from(q: Rational) -> Self {
        ExtendedValue::Finite(q)
    }
}

impl PartialOrd for ExtendedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedValue::NegInf, ExtendedValue::NegInf) => Ordering::Equal,
            (ExtendedValue::NegInf, _) => Ordering::Less,
            (_, ExtendedValue::NegInf) => Ordering::Greater,
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for ExtendedValue {
    type Output = ExtendedValue;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => ExtendedValue::Finite(a + b),
            _ => ExtendedValue::NegInf,
        }
    }
}

impl Add<&Rational> for ExtendedValue {
    type Output = ExtendedValue;
    fn add(self, rhs: &Rational) -> Self {
        match self {
            ExtendedValue::Finite(a) => ExtendedValue::Finite(a + rhs),
            ExtendedValue::NegInf => ExtendedValue::NegInf,
        }
    }
}

impl Sub<&Rational> for ExtendedValue {
    type Output = ExtendedValue;
    fn sub(self, rhs: &Rational) -> Self {
        match self {
            ExtendedValue::Finite(a) => ExtendedValue::Finite(a - rhs),
            ExtendedValue::NegInf => ExtendedValue::NegInf,
        }
    }
}

impl Mul<&Rational> for ExtendedValue {
    type Output = ExtendedValue;
    fn mul(self, rhs: &Rational) -> Self {
        self.scale(rhs)
    }
}

impl Neg for &ExtendedValue {
    type Output = Option<Rational>;
    fn neg(self) -> Option<Rational> {
        self.finite().map(|q| -q)
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::NegInf => f.write_str("-inf"),
            ExtendedValue::Finite(q) => write!(f, "{q}"),
        }
    }
}

impl FromStr for ExtendedValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "-inf" {
            Ok(ExtendedValue::NegInf)
        } else {
            parse_rational(s).map(ExtendedValue::Finite)
        }
    }
}

impl Serialize for ExtendedValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtendedValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `2^{-n}` as an exact rational.
pub fn dyadic(n: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2u8).pow(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neg_inf_is_bottom() {
        assert!(ExtendedValue::NegInf < ExtendedValue::Finite(int(-1_000_000)));
        assert_eq!(ExtendedValue::NegInf.max(int(3).into()), int(3).into());
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(ratio(4, 2).to_string(), "2");
        assert_eq!("-inf".parse::<ExtendedValue>().unwrap(), ExtendedValue::NegInf);
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn zero_weight_kills_neg_inf() {
        assert_eq!(ExtendedValue::NegInf.scale(&int(0)), ExtendedValue::zero());
        assert_eq!(ExtendedValue::NegInf.scale(&ratio(1, 2)), ExtendedValue::NegInf);
    }
}
