//! Exact rationals and exponent values.
//!
//! Every exponent identity in the crate is checked with arbitrary-precision
//! rationals, so no tolerance is ever involved on that side.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `P/Q`, `P`, or a signed variant of either. Whitespace around the
/// tokens is allowed; decimals are not.
pub fn parse_rational(text: &str) -> Result<Q> {
    let bad = || Error::MalformedRational(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let valid = |s: &str, allow_sign: bool| {
        let digits = if allow_sign {
            s.strip_prefix(['-', '+']).unwrap_or(s)
        } else {
            s
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return Err(bad());
    }
    let n = BigInt::from_str(num.trim_start_matches('+')).map_err(|_| bad())?;
    let d = BigInt::from_str(den).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Formats a rational as `P/Q` (or `P` when integral).
pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

/// A Lebesgue exponent: a positive rational or +∞.
///
/// `1/∞ = 0` in every identity, which is how the `(∞, 2)` pair enters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Q),
    Infinite,
}

impl Exponent {
    pub fn finite(x: Q) -> Self {
        Exponent::Finite(x)
    }

    /// Reciprocal, with `1/∞ = 0`. Panics on a zero finite exponent.
    pub fn recip(&self) -> Q {
        match self {
            Exponent::Finite(x) => x.recip(),
            Exponent::Infinite => Q::zero(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn as_finite(&self) -> Option<&Q> {
        match self {
            Exponent::Finite(x) => Some(x),
            Exponent::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(x) => to_f64(x),
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// Hölder conjugate `p' = p/(p-1)`; `1' = ∞`, `∞' = 1`.
    pub fn conjugate(&self) -> Result<Exponent> {
        match self {
            Exponent::Infinite => Ok(Exponent::Finite(Q::one())),
            Exponent::Finite(p) if p.is_one() => Ok(Exponent::Infinite),
            Exponent::Finite(p) if *p > Q::one() => {
                Ok(Exponent::Finite(p / (p - Q::one())))
            }
            Exponent::Finite(p) => Err(Error::Domain(format!(
                "conjugate of exponent {p} < 1 is undefined"
            ))),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Exponent::Finite(x) => x.is_positive(),
            Exponent::Infinite => true,
        }
    }
}

impl From<Q> for Exponent {
    fn from(x: Q) -> Self {
        Exponent::Finite(x)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(x) => write!(f, "{x}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            other => parse_rational(other).map(Exponent::Finite),
        }
    }
}

/// Evaluates `base^exp` in floating point for a rational exponent.
pub fn powq(base: f64, exp: &Q) -> f64 {
    base.powf(to_f64(exp))
}
