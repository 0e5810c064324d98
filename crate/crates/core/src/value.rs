//! Nonnegative rational exponents extended by +∞.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::poly::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("exponent values are nonnegative, got {0}")]
    Negative(String),
    #[error("cannot parse exponent value {0:?}")]
    Parse(String),
}

/// A value in `[0, +∞]` with exact rational finite part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExponentValue {
    Finite(Rational),
    Infinite,
}

impl ExponentValue {
    pub fn new(r: Rational) -> Result<Self, ValueError> {
        if r.is_negative() {
            return Err(ValueError::Negative(r.to_string()));
        }
        Ok(ExponentValue::Finite(r))
    }

    /// Panics on negative input.
    pub fn finite(r: Rational) -> Self {
        Self::new(r).expect("nonnegative exponent")
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::finite(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn integer(v: i64) -> Self {
        Self::finite(Rational::from_integer(BigInt::from(v)))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExponentValue::Infinite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExponentValue::Finite(r) if r.is_zero())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ExponentValue::Finite(r) => Some(r),
            ExponentValue::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExponentValue::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            ExponentValue::Infinite => f64::INFINITY,
        }
    }

    /// `e ↦ e/(1+e)` with `+∞ ↦ 1`. Maps `[0,∞]` onto `[0,1]`.
    pub fn conjugate_fraction(&self) -> Rational {
        match self {
            ExponentValue::Finite(r) => r / (r + Rational::one()),
            ExponentValue::Infinite => Rational::one(),
        }
    }

    /// Inverse of [`conjugate_fraction`](Self::conjugate_fraction):
    /// `s ↦ s/(1−s)` for `s < 1`, `+∞` for `s ≥ 1`.
    pub fn from_conjugate_fraction(s: &Rational) -> Self {
        if *s >= Rational::one() {
            ExponentValue::Infinite
        } else {
            ExponentValue::finite(s / (Rational::one() - s))
        }
    }

    pub fn min(self, other: ExponentValue) -> ExponentValue {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl Ord for ExponentValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExponentValue::Infinite, ExponentValue::Infinite) => Ordering::Equal,
            (ExponentValue::Infinite, _) => Ordering::Greater,
            (_, ExponentValue::Infinite) => Ordering::Less,
            (ExponentValue::Finite(a), ExponentValue::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for ExponentValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Rational> for ExponentValue {
    fn from(r: Rational) -> Self {
        ExponentValue::finite(r)
    }
}

impl fmt::Display for ExponentValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentValue::Infinite => write!(f, "inf"),
            ExponentValue::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            ExponentValue::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for ExponentValue {
    type Err = ValueError;

    /// Accepts `inf`, `+inf`, `∞`, integers and `p/q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(t, "inf" | "+inf" | "∞" | "infinity") {
            return Ok(ExponentValue::Infinite);
        }
        let bad = || ValueError::Parse(s.to_string());
        let r = match t.split_once('/') {
            Some((a, b)) => {
                let num: BigInt = a.trim().parse().map_err(|_| bad())?;
                let den: BigInt = b.trim().parse().map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Rational::new(num, den)
            }
            None => Rational::from_integer(t.parse().map_err(|_| bad())?),
        };
        ExponentValue::new(r)
    }
}

impl Serialize for ExponentValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    LowerBound,
    UpperBound,
}

/// An exponent together with what is known about it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BoundedValue {
    pub value: ExponentValue,
    pub kind: BoundKind,
}

impl BoundedValue {
    pub fn exact(value: ExponentValue) -> Self {
        BoundedValue {
            value,
            kind: BoundKind::Exact,
        }
    }

    pub fn lower(value: ExponentValue) -> Self {
        BoundedValue {
            value,
            kind: BoundKind::LowerBound,
        }
    }

    pub fn upper(value: ExponentValue) -> Self {
        BoundedValue {
            value,
            kind: BoundKind::UpperBound,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.kind == BoundKind::Exact
    }
}

impl fmt::Display for BoundedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BoundKind::Exact => write!(f, "{}", self.value),
            BoundKind::LowerBound => write!(f, ">={}", self.value),
            BoundKind::UpperBound => write!(f, "<={}", self.value),
        }
    }
}
