//! Scalar abstractions shared by the symbolic and numerical layers.
//!
//! [`Coeff`] is the field every exact routine is generic over (polynomials,
//! vector fields, brackets, rank computations). [`Real`] narrows it to the
//! floating point types used by root finding and quadrature.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive, Zero};

/// A coefficient field: exact rationals or IEEE floats.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Zero
    + num_traits::One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Converts a float into the field; `None` for exact types, which have
    /// no representation for transcendental values.
    fn from_f64(v: f64) -> Option<Self>;

    fn is_exact() -> bool;
}

impl Coeff for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(_: f64) -> Option<Self> {
        None
    }

    fn is_exact() -> bool {
        true
    }
}

macro_rules! float_coeff {
    ($($t:ty)*) => ($(
        impl Coeff for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn from_f64(v: f64) -> Option<Self> {
                Some(v as $t)
            }

            fn is_exact() -> bool {
                false
            }
        }
    )*)
}

float_coeff!(f32 f64);

/// Floating point scalar for root finding, sampling and quadrature.
pub trait Real: Coeff + Float + FloatConst + FromPrimitive + Copy {
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite literal")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact rational from a finite float (binary expansion, no rounding).
pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    if v == 0.0 {
        return Some(BigRational::zero());
    }
    BigRational::from_float(v)
}

/// Formats a rational as `p` or `p/q`.
pub fn rational_to_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `p/q` or a finite decimal literal (`-0.25`, `1e-3`) exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
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
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let scale = exp - frac_part.len() as i32 - 1;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut q = BigRational::from_integer(digits);
    if scale >= 0 {
        q *= num_traits::pow(ten, scale as usize);
    } else {
        q /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if neg { -q } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3"), Some(q(3, 1)));
        assert_eq!(parse_rational("-1/2"), Some(q(-1, 2)));
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("-1.5e2"), Some(q(-150, 1)));
        assert_eq!(parse_rational("2.5E-1"), Some(q(1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn exact_float_round_trip() {
        assert_eq!(rational_from_f64(0.375), Some(q(3, 8)));
        assert_eq!(rational_to_string(&q(6, 4)), "3/2");
        assert_eq!(rational_to_string(&q(-4, 2)), "-2");
    }
}
