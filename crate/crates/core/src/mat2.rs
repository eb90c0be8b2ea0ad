//! Plain 2x2 real matrices, row-major.
//!
//! Everything in this crate is closed-form 2x2 math, so the carrier type
//! is four scalars and a handful of inlined operations.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A real 2x2 matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub m11: T,
    pub m12: T,
    pub m21: T,
    pub m22: T,
}

impl<T: Real> Mat2<T> {
    pub fn new(m11: T, m12: T, m21: T, m22: T) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// Rotation by `angle`: [[cos, -sin], [sin, cos]].
    pub fn rotation(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, -s, s, c)
    }

    /// Squeezer diag(1/z, z).
    pub fn squeeze(z: T) -> Self {
        Self::new(z.recip(), T::zero(), T::zero(), z)
    }

    /// The symplectic form for one mode: [[0, 1], [-1, 0]].
    pub fn omega() -> Self {
        Self::new(T::zero(), T::one(), -T::one(), T::zero())
    }

    pub fn trace(&self) -> T {
        self.m11 + self.m22
    }

    pub fn det(&self) -> T {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m11, self.m21, self.m12, self.m22)
    }

    /// Inverse; caller guarantees det != 0.
    pub fn inverse(&self) -> Self {
        let d = self.det().recip();
        Self::new(d * self.m22, -d * self.m12, -d * self.m21, d * self.m11)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    pub fn frobenius_norm(&self) -> T {
        (self.m11 * self.m11 + self.m12 * self.m12 + self.m21 * self.m21 + self.m22 * self.m22)
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.m11.is_finite() && self.m12.is_finite() && self.m21.is_finite() && self.m22.is_finite()
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.m11 + rhs.m11,
            self.m12 + rhs.m12,
            self.m21 + rhs.m21,
            self.m22 + rhs.m22,
        )
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.m11 - rhs.m11,
            self.m12 - rhs.m12,
            self.m21 - rhs.m21,
            self.m22 - rhs.m22,
        )
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.m11, -self.m12, -self.m21, -self.m22)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = Mat2::new(2.0, 1.0, 0.5, 1.0);
        let p = m * m.inverse();
        assert!((p - Mat2::identity()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn rotation_is_orthogonal() {
        let r: Mat2<f64> = Mat2::rotation(0.7);
        assert!((r * r.transpose() - Mat2::identity()).frobenius_norm() < 1e-15);
        assert!((r.det() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn omega_squares_to_minus_identity() {
        let w: Mat2<f64> = Mat2::omega();
        assert_eq!(w * w, -Mat2::<f64>::identity());
    }
}
