//! Scalar abstractions.
//!
//! Two layers are used throughout the crate:
//!
//! * [`Real`] is the minimal arithmetic needed to *evaluate* charts and vector
//!   fields. It is implemented for `f32`, `f64` and for forward-mode
//!   [`Dual`](crate::dual::Dual) numbers over any `Real`, so the same generic
//!   evaluation code yields exact first and second derivatives.
//! * [`Scalar`] is a concrete floating point type (`f32` or `f64`), backed by
//!   `num_traits::Float`. Geometry results are stored in it.
//!
//! [`Field`] covers exact arithmetic as well (`BigRational`), and is what the
//! curvature recursions are written against.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, Zero};

/// Arithmetic closed under the operations used by chart and field programs.
pub trait Real:
    Copy
    + Debug
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
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    fn from_f64(x: f64) -> Self;

    /// Leading (non-infinitesimal) part as `f64`.
    fn primal(self) -> f64;

    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn abs(self) -> Self;

    fn powi(self, k: i32) -> Self {
        let mut acc = Self::one();
        let base = if k < 0 { Self::one() / self } else { self };
        for _ in 0..k.unsigned_abs() {
            acc *= base;
        }
        acc
    }

    fn mul_f64(self, x: f64) -> Self {
        self * Self::from_f64(x)
    }
}

/// Concrete floating point scalar used to store geometric data.
///
/// Deliberately not a subtrait of `num_traits::Float`: both would supply
/// `sqrt`, `sin`, ... and make method calls in generic code ambiguous. The
/// handful of extra functions needed on stored data are listed here instead.
pub trait Scalar: Real + Field + FromPrimitive + Display + LowerExp + Default + Sum {
    fn epsilon() -> Self;
    fn pi() -> Self;
    fn acos(self) -> Self;
    fn asinh(self) -> Self;
    fn atan2(self, other: Self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn is_finite(self) -> bool;
    fn max(self, other: Self) -> Self;
    fn min(self, other: Self) -> Self;

    /// Lift a stored scalar into an evaluation type.
    #[inline]
    fn lift<T: Real>(self) -> T {
        T::from_f64(Real::primal(self))
    }

    #[inline]
    fn of(x: f64) -> Self {
        <Self as Real>::from_f64(x)
    }

    #[inline]
    fn of_usize(k: usize) -> Self {
        <Self as Real>::from_f64(k as f64)
    }
}

macro_rules! impl_real_float {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn primal(self) -> f64 {
                self as f64
            }
            #[inline]
            fn sqrt(self) -> Self {
                Float::sqrt(self)
            }
            #[inline]
            fn sin(self) -> Self {
                Float::sin(self)
            }
            #[inline]
            fn cos(self) -> Self {
                Float::cos(self)
            }
            #[inline]
            fn sinh(self) -> Self {
                Float::sinh(self)
            }
            #[inline]
            fn cosh(self) -> Self {
                Float::cosh(self)
            }
            #[inline]
            fn abs(self) -> Self {
                Float::abs(self)
            }
            #[inline]
            fn powi(self, k: i32) -> Self {
                Float::powi(self, k)
            }
        }

        impl Scalar for $t {
            fn epsilon() -> Self {
                <$t>::EPSILON
            }
            fn pi() -> Self {
                <$t as FloatConst>::PI()
            }
            fn acos(self) -> Self {
                Float::acos(self)
            }
            fn asinh(self) -> Self {
                Float::asinh(self)
            }
            fn atan2(self, other: Self) -> Self {
                Float::atan2(self, other)
            }
            fn ln(self) -> Self {
                Float::ln(self)
            }
            fn exp(self) -> Self {
                Float::exp(self)
            }
            fn is_finite(self) -> bool {
                Float::is_finite(self)
            }
            fn max(self, other: Self) -> Self {
                Float::max(self, other)
            }
            fn min(self, other: Self) -> Self {
                Float::min(self, other)
            }
        }
    };
}

impl_real_float!(f32);
impl_real_float!(f64);

/// A commutative field, exact or floating.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_int(k: i64) -> Self;

    /// Magnitude used for pivot selection. Exact types may return any
    /// monotone proxy.
    fn magnitude(&self) -> f64;
}

impl Field for f32 {
    fn from_int(k: i64) -> Self {
        k as f32
    }
    fn magnitude(&self) -> f64 {
        Float::abs(*self) as f64
    }
}

impl Field for f64 {
    fn from_int(k: i64) -> Self {
        k as f64
    }
    fn magnitude(&self) -> f64 {
        Float::abs(*self)
    }
}

impl Field for BigRational {
    fn from_int(k: i64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }
    fn magnitude(&self) -> f64 {
        use num_traits::{Signed, ToPrimitive};
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Binomial coefficient `n choose k`; zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> u128 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

pub fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}
