//! Scalar abstraction shared by the exact and the floating-point code paths.
//!
//! Everything that only needs field operations (binomial ratios, Dicke-basis
//! density entries, collective-spin moments, covariance matrices, outcome
//! distributions) is written against [`Scalar`], so the same code runs in
//! `f32`, `f64` and exact [`BigRational`] arithmetic. Square roots are the only
//! non-field operation; the exact type supports them on perfect squares.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialOrd + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `true` when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn from_ratio(num: &BigInt, den: &BigInt) -> Self;

    /// Square root if it is representable; floats return `None` only for negative input.
    fn try_sqrt(&self) -> Option<Self>;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("every scalar type represents small integers")
    }

    fn from_bigint(v: &BigInt) -> Self {
        Self::from_ratio(v, &BigInt::one())
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Floating-point scalars (`f32`, `f64`): everything [`Scalar`] offers plus the
/// transcendental functions needed by Gaussian POVMs and eigen-solvers.
pub trait Real: Scalar + Float + FloatConst {}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
                BigRational::new_raw(num.clone(), den.clone())
                    .to_f64()
                    .map(|v| v as $t)
                    .unwrap_or(<$t>::NAN)
            }

            fn try_sqrt(&self) -> Option<Self> {
                (*self >= 0.0).then(|| self.sqrt())
            }

            fn abs_val(&self) -> Self {
                Float::abs(*self)
            }
        }

        impl Real for $t {}
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        BigRational::new(num.clone(), den.clone())
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        // Ratio keeps numerator and denominator coprime, so the root is rational
        // exactly when both are perfect squares.
        let num = exact_isqrt(self.numer())?;
        let den = exact_isqrt(self.denom())?;
        Some(BigRational::new(num, den))
    }

    fn abs_val(&self) -> Self {
        Signed::abs(self)
    }
}

fn exact_isqrt(v: &BigInt) -> Option<BigInt> {
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

/// Square root of a non-negative integer radicand in the scalar type.
pub(crate) fn sqrt_of_int<S: Scalar>(radicand: u128) -> Option<S> {
    if S::EXACT {
        let root = radicand.sqrt();
        if root * root == radicand {
            return Some(S::from_bigint(&BigInt::from(root)));
        }
        None
    } else {
        S::from_bigint(&BigInt::from(radicand)).try_sqrt()
    }
}

/// Converts a scalar to `f64`, used where exact results are reported.
pub fn to_f64<S: Scalar>(v: &S) -> f64 {
    v.to_f64_lossy()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_sqrt_only_on_squares() {
        assert_eq!(q(9, 16).try_sqrt(), Some(q(3, 4)));
        assert_eq!(q(1, 2).try_sqrt(), None);
        assert_eq!(q(-1, 4).try_sqrt(), None);
        assert_eq!(q(0, 1).try_sqrt(), Some(q(0, 1)));
    }

    #[test]
    fn float_sqrt_and_ratio() {
        assert_eq!(2.25_f64.try_sqrt(), Some(1.5));
        assert_eq!((-1.0_f64).try_sqrt(), None);
        let big = BigInt::from(10).pow(80);
        let r = f64::from_ratio(&(&big * 3), &big);
        assert!((r - 3.0).abs() < 1e-15);
        assert!((f32::from_ratio(&BigInt::from(1), &BigInt::from(4)) - 0.25).abs() < 1e-7);
    }

    #[test]
    fn integer_radicands() {
        assert_eq!(sqrt_of_int::<BigRational>(49), Some(q(7, 1)));
        assert_eq!(sqrt_of_int::<BigRational>(50), None);
        assert!((sqrt_of_int::<f64>(2).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }
}
