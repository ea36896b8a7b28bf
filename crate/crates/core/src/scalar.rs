//! Floating-point scalars the interval and geometry code is generic over.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};

/// A binary floating-point type with ulp stepping.
pub trait Scalar: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    /// The next representable value toward +∞.
    fn next_up(self) -> Self;
    /// The next representable value toward −∞.
    fn next_down(self) -> Self;
    /// Nearest value of this type to `x`.
    fn lit(x: f64) -> Self;
    fn as_f64(self) -> f64;
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn next_up(self) -> Self {
                <$t>::next_up(self)
            }
            #[inline]
            fn next_down(self) -> Self {
                <$t>::next_down(self)
            }
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
