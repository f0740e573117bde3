//! Exact rational scalars and their canonical text form.
//!
//! Every number in this crate is a [`Rational`]. The text form is `"p"` for
//! integers and `"p/q"` otherwise, always reduced with a positive
//! denominator; parsing rejects anything that is not already in that form so
//! that serialized scenes round-trip byte for byte.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics on `d == 0`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Canonical text form: `"p"` or `"p/q"`.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses the canonical text form. Non-reduced fractions, a non-positive
/// denominator, whitespace and explicit `+` signs are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let parse_int = |t: &str| -> Result<BigInt, String> {
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("`{s}` is not a rational of the form p or p/q"));
        }
        if digits.len() > 1 && digits.starts_with('0') {
            return Err(format!("`{s}` has a leading zero"));
        }
        if t == "-0" {
            return Err(format!("`{s}` is not normalized"));
        }
        t.parse::<BigInt>().map_err(|e| format!("`{s}`: {e}"))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if !d.is_positive() {
                return Err(format!("`{s}` must have a positive denominator"));
            }
            let x = Rational::new(n.clone(), d.clone());
            if x.numer() != &n || x.denom() != &d || d.is_one() {
                return Err(format!("`{s}` is not normalized"));
            }
            Ok(x)
        }
    }
}

/// Lenient parse used for user-typed coefficients on the command line:
/// accepts any `p/q` with nonzero `q` and reduces it.
pub fn parse_rational_lenient(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        None => (s, "1"),
        Some(pair) => pair,
    };
    let n: BigInt = n
        .trim()
        .parse()
        .map_err(|_| format!("bad rational `{s}`"))?;
    let d: BigInt = d
        .trim()
        .parse()
        .map_err(|_| format!("bad rational `{s}`"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rational::new(n, d))
}

/// A rational extended by `+∞`, used for ratios whose denominator may vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extended {
    Finite(Rational),
    Infinite,
}

impl Extended {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::Infinite => None,
        }
    }

    pub fn min(self, other: Extended) -> Extended {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => f.write_str(&format_rational(x)),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl serde::Serialize for Extended {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Serde adapters that store rationals as canonical strings.
pub mod serde_rational {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&format_rational(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|s| parse_rational(s).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod map {
        use super::*;
        use serde::ser::SerializeMap;
        use std::collections::BTreeMap;

        pub fn serialize<S: Serializer>(
            xs: &BTreeMap<String, Rational>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            let mut map = s.serialize_map(Some(xs.len()))?;
            for (k, v) in xs {
                map.serialize_entry(k, &format_rational(v))?;
            }
            map.end()
        }
    }
}
