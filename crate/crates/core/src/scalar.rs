//! Scalar abstraction shared by the linear algebra and affine-map layers.
//!
//! Exact work uses [`Rational`](crate::Rational); `f64`/`f32` instantiations
//! exist for the numeric cross-checks.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// A field element the matrix routines can run over.
pub trait Scalar: Clone + Debug + PartialEq + PartialOrd + Num + Signed + Send + Sync {
    /// True when the value is an integer.
    fn is_integral(&self) -> bool;

    fn from_i64(v: i64) -> Self;

    fn approx_f64(&self) -> f64;
}

impl Scalar for BigRational {
    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn is_integral(&self) -> bool {
                self.is_finite() && self.fract() == 0.0
            }

            fn from_i64(v: i64) -> Self {
                v as $f
            }

            fn approx_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

/// `p/q` as an exact rational. Panics on `q == 0`.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as an exact rational.
pub fn int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// Parses `"p/q"` or `"p"`; the result is always reduced with positive denominator.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let r = BigRational::from_str(s).ok()?;
    if r.denom().is_zero() {
        return None;
    }
    Some(r)
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: &BigRational) -> BigRational {
    r - r.floor()
}
