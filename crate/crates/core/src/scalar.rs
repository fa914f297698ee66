//! Scalar fields used by the linear algebra: `f64` with tolerance-based
//! zero tests, and arbitrary-precision rationals with exact ones.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub trait Field:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and tolerances are ignored.
    const EXACT: bool;

    fn from_ratio(p: i64, q: i64) -> Self;
    fn from_usize(k: usize) -> Self {
        Self::from_ratio(k as i64, 1)
    }
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    /// `|x| <= tol` for floats, `x == 0` for exact fields.
    fn negligible(&self, tol: f64) -> bool;

    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.abs().partial_cmp(&other.abs()).unwrap_or(Ordering::Equal)
    }
}

impl Field for f64 {
    const EXACT: bool = false;

    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn negligible(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }
}

impl Field for Rational {
    const EXACT: bool = true;

    fn from_ratio(p: i64, q: i64) -> Self {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

/// Parses `"p/q"` or `"p"` into an exact rational; `q` must be positive.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in rational {text:?}")))?;
    let q: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in rational {text:?}")))?;
    if q <= BigInt::zero() {
        return Err(Error::Parse(format!("denominator must be positive in {text:?}")));
    }
    Ok(BigRational::new(p, q))
}

/// Formats a rational as `"p/q"`, or `"p"` for integers.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}
