//! Dual-mode arithmetic.
//!
//! Closed-form quantities are generic over [`Scalar`], which is implemented
//! for `f64` (floating mode) and [`BigRational`] (exact mode). Anything that
//! needs a square root or a root search converts to `f64` explicitly.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Exact,
    Float,
}

impl Display for ArithmeticMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArithmeticMode::Exact => f.write_str("exact"),
            ArithmeticMode::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    const MODE: ArithmeticMode;

    fn from_rational(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// The exact value, available only in exact mode.
    fn to_rational(&self) -> Option<BigRational>;

    fn from_int(i: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(i)))
    }

    fn from_u32(i: u32) -> Self {
        Self::from_int(i64::from(i))
    }

    /// Decides `self == 0` relative to `scale`. Exact mode ignores the
    /// tolerance; floating mode tests `|self| <= rel_tol * |scale|`.
    fn near_zero(&self, scale: &Self, rel_tol: f64) -> bool;
}

impl Scalar for f64 {
    const MODE: ArithmeticMode = ArithmeticMode::Float;

    fn from_rational(r: &BigRational) -> Self {
        ratio_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<BigRational> {
        None
    }

    fn from_int(i: i64) -> Self {
        i as f64
    }

    fn near_zero(&self, scale: &Self, rel_tol: f64) -> bool {
        self.abs() <= rel_tol * scale.abs()
    }
}

impl Scalar for BigRational {
    const MODE: ArithmeticMode = ArithmeticMode::Exact;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn near_zero(&self, _scale: &Self, _rel_tol: f64) -> bool {
        self.is_zero()
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        return v;
    }
    // Fall back to a shifted integer division for huge operands.
    let (num, den) = (r.numer(), r.denom());
    let shift = num.bits().max(den.bits()) as i64 - 60;
    let shift = shift.max(0);
    let n = (num >> shift as usize).to_f64().unwrap_or(f64::NAN);
    let d = (den >> shift as usize).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Parses `"p/q"` or an integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(t).map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A user-supplied number: exact when written as an integer or `p/q`,
/// floating when written with a decimal point or exponent.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(BigRational),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(r) => ratio_to_f64(r),
            Number::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Number::Exact(r) => Some(r),
            Number::Float(_) => None,
        }
    }
}

impl FromStr for Number {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        if let Ok(r) = parse_rational(t) {
            return Ok(Number::Exact(r));
        }
        let x: f64 = t
            .parse()
            .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
        if !x.is_finite() {
            return Err(Error::Parse(format!("not a finite number: {s:?}")));
        }
        Ok(Number::Float(x))
    }
}

impl Display for Number {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Number::Exact(r) => f.write_str(&format_rational(r)),
            Number::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Parses a comma-separated list of numbers.
pub fn parse_number_list(s: &str) -> Result<Vec<Number>> {
    s.split(',').map(str::parse).collect()
}

/// Closest rational with denominator at most `max_den`, with its distance.
pub fn nearest_rational(x: f64, max_den: u32) -> (BigRational, f64) {
    let mut best = (BigRational::zero(), f64::INFINITY);
    for den in 1..=max_den {
        let num = (x * f64::from(den)).round();
        let err = (x - num / f64::from(den)).abs();
        if err < best.1 - 1e-15 {
            let r = BigRational::new(BigInt::from_f64(num).unwrap_or_default(), BigInt::from(den));
            best = (r, err);
        }
    }
    best
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
