//! Numeric backends for probability weights.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. Two backends are
//! provided: arbitrary-precision rationals ([`Rational`]), for which every
//! order decision is exact, and `f64`, where comparisons are made within a
//! caller-supplied epsilon.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Numeric backend of a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    const MODE: Mode;

    fn from_ratio(num: u64, den: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Three-way comparison; values closer than `eps` are `Equal` in float
    /// mode. `eps` is ignored by exact backends.
    fn cmp_tol(&self, other: &Self, eps: f64) -> Ordering;

    fn is_finite_weight(&self) -> bool;

    /// JSON form of a single weight: `"num/den"` for rationals, a number for floats.
    fn serialize_weight<S: Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error>;

    /// Human-readable rendering used in reports.
    fn render(&self) -> String;

    fn from_count(n: usize) -> Self {
        Self::from_ratio(n as u64, 1)
    }

    fn lt_tol(&self, other: &Self, eps: f64) -> bool {
        self.cmp_tol(other, eps) == Ordering::Less
    }

    fn gt_tol(&self, other: &Self, eps: f64) -> bool {
        self.cmp_tol(other, eps) == Ordering::Greater
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_ratio(num: u64, den: u64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn cmp_tol(&self, other: &Self, _eps: f64) -> Ordering {
        self.cmp(other)
    }

    fn is_finite_weight(&self) -> bool {
        true
    }

    fn serialize_weight<S: Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }

    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn cmp_tol(&self, other: &Self, eps: f64) -> Ordering {
        if (self - other).abs() <= eps {
            Ordering::Equal
        } else if self < other {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    fn is_finite_weight(&self) -> bool {
        self.is_finite()
    }

    fn serialize_weight<S: Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(*self)
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

/// Parses `"num/den"`, an integer, or a decimal such as `"0.15"` or `"1.5e-2"`
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if text.is_empty() {
        return Err(bad());
    }
    if text.contains('/') {
        let r = Rational::from_str(text).map_err(|_| bad())?;
        return Ok(r);
    }

    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = text[pos + 1..].parse().map_err(|_| bad())?;
            (&text[..pos], exp)
        }
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Exact rational equal to the shortest decimal that round-trips `value`.
pub fn rational_from_f64(value: f64) -> Result<Rational> {
    if !value.is_finite() {
        return Err(Error::Parse(format!("not a finite number: {value}")));
    }
    // `{:e}` prints the shortest round-tripping digits, which keeps 0.7 as 7/10.
    parse_rational(&format!("{value:e}"))
}
