//! Exact rational numbers for numeric fluents.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational value. Planner and validator decisions over numeric
/// fluents never touch floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Number(Rational64);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number literal `{0}`")]
pub struct ParseNumberError(pub String);

impl Number {
    pub const ZERO: Number = Number(Rational64::new_raw(0, 1));

    pub fn new(numer: i64, denom: i64) -> Self {
        Number(Rational64::new(numer, denom))
    }

    pub fn from_int(v: i64) -> Self {
        Number(Rational64::from_integer(v))
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    /// Lossy conversion, for display and embeddings only.
    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Decimal rendering when the expansion terminates, otherwise `None`.
    pub fn to_decimal(&self) -> Option<String> {
        if self.is_integer() {
            return Some(self.numer().to_string());
        }
        let mut d = self.denom();
        let (mut twos, mut fives) = (0u32, 0u32);
        while d % 2 == 0 {
            d /= 2;
            twos += 1;
        }
        while d % 5 == 0 {
            d /= 5;
            fives += 1;
        }
        if d != 1 {
            return None;
        }
        let digits = twos.max(fives);
        let scale = 10i128.pow(digits);
        let scaled = self.numer() as i128 * scale / self.denom() as i128;
        let neg = scaled < 0;
        let abs = scaled.unsigned_abs();
        let int_part = abs / scale as u128;
        let frac_part = abs % scale as u128;
        let mut frac = format!("{:0width$}", frac_part, width = digits as usize);
        while frac.ends_with('0') {
            frac.pop();
        }
        Some(format!(
            "{}{}.{}",
            if neg { "-" } else { "" },
            int_part,
            frac
        ))
    }
}

impl From<i64> for Number {
    fn from(v: i64) -> Self {
        Number::from_int(v)
    }
}

impl Add for Number {
    type Output = Number;
    fn add(self, rhs: Number) -> Number {
        Number(self.0 + rhs.0)
    }
}

impl Sub for Number {
    type Output = Number;
    fn sub(self, rhs: Number) -> Number {
        Number(self.0 - rhs.0)
    }
}

impl Mul for Number {
    type Output = Number;
    fn mul(self, rhs: Number) -> Number {
        Number(self.0 * rhs.0)
    }
}

impl Neg for Number {
    type Output = Number;
    fn neg(self) -> Number {
        Number(-self.0)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Number {
    type Err = ParseNumberError;

    /// Accepts integers, terminating decimals (`2.5`, `-0.25`) and `p/q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseNumberError(s.to_string());
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| err())?;
            let q: i64 = q.trim().parse().map_err(|_| err())?;
            if q == 0 {
                return Err(err());
            }
            return Ok(Number::new(p, q));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        if body.is_empty() {
            return Err(err());
        }
        let (int_s, frac_s) = body.split_once('.').unwrap_or((body, ""));
        if !int_s.chars().all(|c| c.is_ascii_digit())
            || !frac_s.chars().all(|c| c.is_ascii_digit())
            || (int_s.is_empty() && frac_s.is_empty())
            || frac_s.len() > 15
        {
            return Err(err());
        }
        let int_v: i64 = if int_s.is_empty() {
            0
        } else {
            int_s.parse().map_err(|_| err())?
        };
        let scale = 10i64.pow(frac_s.len() as u32);
        let frac_v: i64 = if frac_s.is_empty() {
            0
        } else {
            frac_s.parse().map_err(|_| err())?
        };
        let numer = int_v
            .checked_mul(scale)
            .and_then(|v| v.checked_add(frac_v))
            .ok_or_else(err)?;
        let n = Number::new(numer, scale);
        Ok(if neg { -n } else { n })
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_integer() {
            serializer.serialize_i64(self.numer())
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct NumberVisitor;

        impl Visitor<'_> for NumberVisitor {
            type Value = Number;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a rational literal string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Number, E> {
                Ok(Number::from_int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Number, E> {
                i64::try_from(v)
                    .map(Number::from_int)
                    .map_err(|_| E::custom("integer out of range"))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Number, E> {
                v.to_string().parse().map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Number, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(NumberVisitor)
    }
}
