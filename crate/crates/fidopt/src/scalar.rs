//! Scalar abstraction for the real field underlying all matrix kernels.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::{Product, Sum};

/// Real scalar type the whole library is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + NumAssign
    + Sum
    + Product
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for tolerance constants and literals.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant must convert to scalar type")
    }

    /// Lossy conversion from `usize` (dimensions entering relative thresholds).
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize must convert to scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the library scalar.
pub type C<T> = Complex<T>;

/// `x + 0i` as a complex value.
#[inline]
pub fn cr<T: Scalar>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// `0 + 0i`.
#[inline]
pub fn czero<T: Scalar>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// `1 + 0i`.
#[inline]
pub fn cone<T: Scalar>() -> C<T> {
    Complex::new(T::one(), T::zero())
}
