use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the two-level kinematics, inequality and overlap
/// code is written against. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Reduces an angle into `[0, 2π)`.
#[inline]
pub fn fold_angle<F: Real>(angle: F) -> F {
    let two_pi = F::TAU();
    let folded = angle - two_pi * (angle / two_pi).floor();
    if folded >= two_pi {
        folded - two_pi
    } else {
        folded
    }
}
