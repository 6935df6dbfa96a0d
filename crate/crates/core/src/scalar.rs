//! The exact scalar abstraction.
//!
//! Every algorithm in the crate is written against [`Scalar`], an ordered
//! field with exact arithmetic. It is implemented for `Ratio<T>` over any
//! signed integer type, so the same code runs on arbitrary-precision
//! rationals (the default, see [`crate::Rational`]) and on machine-word
//! rationals when the magnitudes are known to stay small.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

use crate::error::{MmmError, Result};

pub trait Scalar: Clone + Ord + Debug + Display + FromStr + Num + Signed + Send + Sync + 'static {
    fn from_int(n: i64) -> Self;

    fn from_count(n: usize) -> Self;

    /// `num / den` in lowest terms.
    fn from_fraction(num: i64, den: i64) -> Result<Self>;

    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }

    /// The mean of two values, `<a, b>`.
    fn midpoint(a: &Self, b: &Self) -> Self {
        (a.clone() + b.clone()).half()
    }

    fn is_integral(&self) -> bool;

    /// Greatest integer not exceeding `self`.
    fn floor_value(&self) -> Self;
}

impl<T> Scalar for Ratio<T>
where
    T: Clone + Integer + Signed + FromPrimitive + Debug + Display + FromStr + Send + Sync + 'static,
{
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(T::from_i64(n).expect("integer out of range for scalar type"))
    }

    fn from_count(n: usize) -> Self {
        Ratio::from_integer(T::from_usize(n).expect("count out of range for scalar type"))
    }

    fn from_fraction(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(MmmError::ZeroDenominator);
        }
        let n = T::from_i64(num).ok_or_else(|| MmmError::Domain("numerator out of range".into()))?;
        let d = T::from_i64(den).ok_or_else(|| MmmError::Domain("denominator out of range".into()))?;
        Ok(Ratio::new(n, d))
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }
}

/// Canonical rational `p/q`: positive denominator, reduced, zero as `0/1`.
pub fn normalize<T>(p: T, q: T) -> Result<Ratio<T>>
where
    T: Clone + Integer,
{
    if q.is_zero() {
        return Err(MmmError::ZeroDenominator);
    }
    // Ratio::new reduces and moves the sign onto the numerator.
    Ok(Ratio::new(p, q))
}

/// Parses `p/q`, `-p/q`, `+p/q` or a bare integer `p`. Surrounding
/// whitespace is ignored; `q = 0` is rejected.
pub fn parse_scalar<S: Scalar>(text: &str) -> Result<S> {
    let t = text.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    if t.is_empty() {
        return Err(MmmError::Parse(text.to_string()));
    }
    if let Some((_, den)) = t.split_once('/') {
        let den = den.trim();
        if den.starts_with(['-', '+']) {
            return Err(MmmError::Parse(text.to_string()));
        }
        if !den.is_empty() && den.bytes().all(|b| b == b'0') {
            return Err(MmmError::ZeroDenominator);
        }
    }
    let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    compact.parse::<S>().map_err(|_| MmmError::Parse(text.to_string()))
}

/// Parses a comma-separated set literal such as `-506,0,1,25/4`.
pub fn parse_set<S: Scalar>(text: &str) -> Result<Vec<S>> {
    let text = text.trim();
    let text = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(text);
    if text.trim().is_empty() {
        return Err(MmmError::EmptySet);
    }
    text.split(',').map(parse_scalar).collect()
}

/// Canonical text form: `p/q`, or bare `p` when the denominator is one.
pub fn format_scalar<S: Scalar>(x: &S) -> String {
    x.to_string()
}

pub fn format_set<S: Scalar>(xs: &[S]) -> String {
    xs.iter().map(format_scalar).collect::<Vec<_>>().join(",")
}
