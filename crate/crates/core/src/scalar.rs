use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast, ToPrimitive};

/// Floating-point scalar used for every real-valued quantity: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + serde::Serialize + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts any primitive number into `T`.
///
/// Panics only if the value is unrepresentable, which cannot happen for the
/// integer ranges this crate produces.
#[inline]
pub fn cast<T: Scalar, V: ToPrimitive>(v: V) -> T {
    <T as NumCast>::from(v).expect("value representable as a float")
}
