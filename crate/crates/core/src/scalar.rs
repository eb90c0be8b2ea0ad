//! Scalar abstraction for the 2x2 symplectic machinery.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the closed-form 2x2 math is generic over (`f32` or `f64`).
pub trait Real: Float + FloatConst + FromPrimitive + std::fmt::Debug + std::fmt::Display {
    /// Shorthand for lossy conversion from `f64` literals.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to any Real")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }
}

impl Real for f32 {}
impl Real for f64 {}
