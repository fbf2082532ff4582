//! Scalar abstraction shared by the moment formulas.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// A field the moment formulas can be evaluated in.
///
/// Implemented for `f32`, `f64` and [`BigRational`]. Integer counts and
/// exact rationals are injected through [`Scalar::from_biguint`] and
/// [`Scalar::from_ratio`].
pub trait Scalar: Clone + Debug + PartialOrd + Num + Neg<Output = Self> {
    fn from_biguint(value: &BigUint) -> Self;

    fn from_ratio(value: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    fn from_u64(value: u64) -> Self {
        Self::from_biguint(&BigUint::from(value))
    }

    fn from_i64(value: i64) -> Self {
        Self::from_ratio(&BigRational::from_integer(BigInt::from(value)))
    }

    /// `true` when arithmetic is exact (rational), `false` for floats.
    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn from_biguint(value: &BigUint) -> Self {
        value.to_f64().unwrap_or(f64::INFINITY)
    }

    fn from_ratio(value: &BigRational) -> Self {
        ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_u64(value: u64) -> Self {
        value as f64
    }

    fn from_i64(value: i64) -> Self {
        value as f64
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for f32 {
    fn from_biguint(value: &BigUint) -> Self {
        value.to_f32().unwrap_or(f32::INFINITY)
    }

    fn from_ratio(value: &BigRational) -> Self {
        ToPrimitive::to_f64(value).map(|v| v as f32).unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn from_u64(value: u64) -> Self {
        value as f32
    }

    fn from_i64(value: i64) -> Self {
        value as f32
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn from_biguint(value: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(value.clone()))
    }

    fn from_ratio(value: &BigRational) -> Self {
        value.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        true
    }
}

/// `base^exp` by repeated squaring.
pub fn powi<S: Scalar>(base: &S, exp: usize) -> S {
    num_traits::pow::pow(base.clone(), exp)
}

/// Render a rational as `p/q`, always including the denominator.
pub fn ratio_string(value: &BigRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parse `p/q`, an integer, or a finite decimal such as `0.3` or `-1.25e-2`
/// into an exact rational.
pub fn parse_ratio(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}
