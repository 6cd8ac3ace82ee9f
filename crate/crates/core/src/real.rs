//! Scalar abstraction for the billiard kernel.
//!
//! The geometry and flow routines are generic over [`Real`] so the same code
//! can run in plain `f64` or in double-double precision ([`TwoFloat`]). The
//! latter is used where chaotic amplification of rounding errors would
//! otherwise swamp a check, e.g. time-reversal over many collisions.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub use twofloat::TwoFloat;

pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    /// Round half away from zero.
    fn round(self) -> Self;

    /// Quotient at the full precision of the type.
    #[inline]
    fn quot(self, rhs: Self) -> Self {
        self / rhs
    }

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn round(self) -> Self {
        f64::round(self)
    }
}

impl Real for TwoFloat {
    #[inline]
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        TwoFloat::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        TwoFloat::abs(&self)
    }
    #[inline]
    fn round(self) -> Self {
        TwoFloat::round(self)
    }
    /// `twofloat`'s `/` is accurate only to about `1e-17` relative; one
    /// correction step restores double-double accuracy.
    #[inline]
    fn quot(self, rhs: Self) -> Self {
        let q = self / rhs;
        q + (self - q * rhs) / rhs
    }
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc += *x * *y;
    }
    acc
}

#[inline]
pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
