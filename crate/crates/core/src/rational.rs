//! Exact rationals.
//!
//! Every quantity in the engine is a [`Rat`], an arbitrary precision
//! fraction kept in lowest terms with a positive denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d`; panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Canonical text form: `n` for integers, `n/d` otherwise.
pub fn fmt_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Why a rational literal was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatParseError {
    /// Decimal point or exponent: the value would not be exact.
    #[error("inexact numeric literal")]
    Inexact,
    #[error("malformed rational literal")]
    Malformed,
    #[error("zero denominator")]
    ZeroDenominator,
}

/// Parse `n`, `-n`, `n/d` (optionally with a leading `+`).
///
/// Decimal literals such as `0.25` or `1e3` are rejected as
/// [`RatParseError::Inexact`] rather than silently converted.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let s = s.trim();
    if s.contains(['.', 'e', 'E']) && !s.is_empty() {
        return Err(RatParseError::Inexact);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let parse_int = |t: &str| -> Result<BigInt, RatParseError> {
        let digits = t.strip_prefix(['+', '-']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(RatParseError::Malformed);
        }
        t.parse::<BigInt>().map_err(|_| RatParseError::Malformed)
    };
    let n = parse_int(num)?;
    match den {
        None => Ok(Rat::from_integer(n)),
        Some(d) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(RatParseError::ZeroDenominator);
            }
            Ok(Rat::new(n, d))
        }
    }
}

/// Nearest `f64`, for oracles and report rendering only.
pub fn to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Out of f64 range: fall back to a sign-correct infinity.
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn is_integer(q: &Rat) -> bool {
    q.denom().is_one()
}
