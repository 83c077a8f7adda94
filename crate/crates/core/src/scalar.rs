//! Scalar abstraction shared by the combinatorial and series layers.
//!
//! Every algebraic routine is generic over [`Scalar`] so the same code runs in
//! exact rational arithmetic (for identity checks) and in `f64` / complex
//! floating point (for numerics).

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

/// Exact rational numbers with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    /// Nearest representable value. Exact for `f64` inputs into [`Rational`].
    fn from_f64(v: f64) -> Self;

    /// Absolute value (modulus for complex scalars) as `f64`.
    fn magnitude(&self) -> f64;

    fn is_finite(&self) -> bool {
        true
    }

    fn powi(&self, exp: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn powi(&self, exp: usize) -> Self {
        f64::powi(*self, exp as i32)
    }
}

impl Scalar for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).unwrap_or_else(Rational::zero)
    }

    fn magnitude(&self) -> f64 {
        let v = if self < &Rational::zero() {
            -self.clone()
        } else {
            self.clone()
        };
        v.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// `num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Lossy conversion of an exact rational to `f64`.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

