//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar the linear algebra is generic over.
///
/// Implemented for `f32` and `f64`. Tolerances quoted in `f64` are mapped
/// through [`Real::tol`], which never lets a gate drop below a small multiple
/// of machine epsilon, so the same code paths stay usable at single precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(256.0);
        Self::lit(x).max(floor)
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over a [`Real`].
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Clamp `x` into `[lo, hi]` when it overshoots by at most `slack`.
///
/// Returns `None` for larger violations so callers can surface them as errors.
pub(crate) fn clamp_within<T: Real>(x: T, lo: T, hi: T, slack: T) -> Option<T> {
    if x.is_nan() || x < lo - slack || x > hi + slack {
        None
    } else {
        Some(x.max(lo).min(hi))
    }
}
