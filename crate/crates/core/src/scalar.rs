//! Scalar abstraction: the whole model is evaluated in a caller-chosen
//! floating-point type.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the power model and solvers operate on.
///
/// Implemented by `f32` and `f64` through the blanket impl.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + AddAssign + SubAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lift an `f64` constant into the scalar type.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("constant not representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_float_widths_qualify() {
        fn takes_scalar<T: Scalar>(v: T) -> T {
            v + T::c(1.5)
        }
        assert_eq!(takes_scalar(1.0_f64), 2.5);
        assert_eq!(takes_scalar(1.0_f32), 2.5);
    }
}
