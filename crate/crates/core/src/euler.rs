//! Unique Euler (singular value) decomposition S = R_theta Z R_phi.
//!
//! Z = diag(1/z, z) with z >= 1. Uniqueness requires half-open angle
//! ranges theta in [-pi + theta0, pi + theta0) and
//! phi in [-pi/2 + phi0, pi/2 + phi0); the degenerate z = 1 plane pins
//! phi = phi0 and lets theta label the rotation.

use serde::{Deserialize, Serialize};

use crate::algebra::SymplecticMatrix;
use crate::error::{Result, Sp2Error};
use crate::mat2::Mat2;
use crate::scalar::Real;

/// z within this distance of 1 is treated as the degenerate rotation case.
const Z_DEGENERATE_TOL: f64 = 1e-9;

/// Centre offsets of the angle ranges, fixed per decomposition context.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeOffsets<T> {
    pub theta0: T,
    pub phi0: T,
}

impl<T: Real> Default for RangeOffsets<T> {
    /// The plotting convention (theta0, phi0) = (0, pi/2), giving
    /// theta in [-pi, pi) and phi in [0, pi).
    fn default() -> Self {
        Self {
            theta0: T::zero(),
            phi0: T::FRAC_PI_2(),
        }
    }
}

/// The unique decomposition parameters (theta, z, phi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerTriple<T> {
    pub theta: T,
    pub zed: T,
    pub phi: T,
}

impl<T: Real> EulerTriple<T> {
    pub fn new(theta: T, zed: T, phi: T) -> Self {
        Self { theta, zed, phi }
    }
}

/// Wraps `angle` into [centre - width/2, centre + width/2) by multiples
/// of `width`; returns the wrapped angle and the (integer) shift count.
fn wrap_into<T: Real>(angle: T, centre: T, width: T) -> (T, i64) {
    let lo = centre - width * T::half();
    let mut k = ((angle - lo) / width).floor();
    let mut out = angle - k * width;
    // guard against floating boundary spill
    if out < lo {
        out = out + width;
        k = k - T::one();
    } else if out >= lo + width {
        out = out - width;
        k = k + T::one();
    }
    (out, -(k.to_f64().unwrap_or(0.0) as i64))
}

/// Decomposes a symplectic matrix into its unique Euler triple.
pub fn decompose<T: Real>(
    s: &SymplecticMatrix<T>,
    offsets: &RangeOffsets<T>,
) -> Result<EulerTriple<T>> {
    let m = s.mat();
    let det = m.det();
    if (det - T::one()).abs() > T::of(1e-8) * det.abs().max(T::one()) {
        return Err(Sp2Error::NotSymplectic {
            det: det.to_f64().unwrap_or(f64::NAN),
        });
    }

    // G = S S^T = R_theta Z^2 R_theta^T carries z and theta.
    let g = m * m.transpose();
    let half_tr = g.trace() * T::half();
    // eigenvalues are z^2 and 1/z^2 with product 1
    let disc = (half_tr * half_tr - T::one()).max(T::zero()).sqrt();
    let z = (half_tr + disc).sqrt();

    if z - T::one() <= T::of(Z_DEGENERATE_TOL) {
        // S is (numerically) a rotation: S = R_total = R_theta R_phi0.
        let total = m.m21.atan2(m.m11);
        let (theta, _) = wrap_into(total - offsets.phi0, offsets.theta0, T::two() * T::PI());
        return Ok(EulerTriple::new(theta, T::one(), offsets.phi0));
    }

    // G = R_theta diag(1/z^2, z^2) R_theta^T gives
    // g22 - g11 = cos(2 theta) (z^2 - 1/z^2), -2 g12 = sin(2 theta) (z^2 - 1/z^2),
    // so theta is recovered mod pi with the positive common factor dropped.
    let theta_raw = (-(g.m12 + g.m12)).atan2(g.m22 - g.m11) * T::half();

    // R_phi = Z^{-1} R_theta^T S
    let rphi = Mat2::squeeze(z).inverse() * Mat2::rotation(theta_raw).transpose() * m;
    let phi_raw = rphi.m21.atan2(rphi.m11);

    // The pair is unique up to simultaneous shifts (theta + n pi, phi + m pi)
    // with n, m of equal parity. Wrapping phi into its width-pi range fixes m;
    // theta then absorbs a compensating pi when m is odd.
    let (phi, m_shift) = wrap_into(phi_raw, offsets.phi0, T::PI());
    let theta_adj = if m_shift.rem_euclid(2) == 1 {
        theta_raw + T::PI()
    } else {
        theta_raw
    };
    let (theta, _) = wrap_into(theta_adj, offsets.theta0, T::two() * T::PI());

    Ok(EulerTriple::new(theta, z, phi))
}

/// Rebuilds R_theta diag(1/z, z) R_phi.
pub fn compose<T: Real>(e: &EulerTriple<T>) -> SymplecticMatrix<T> {
    let m = Mat2::rotation(e.theta) * Mat2::squeeze(e.zed) * Mat2::rotation(e.phi);
    SymplecticMatrix::from_mat_unchecked(m)
}

/// The decomposition of the identity obtained as the t -> 0 limit along
/// trajectories of the hyperbolic normal form: I = R_{-3pi/4} R_{3pi/4}.
///
/// Distinct from `decompose(I)`, which applies the generic degenerate
/// convention phi = phi0.
pub fn identity_limit_triple<T: Real>() -> EulerTriple<T> {
    let q = T::of(0.75) * T::PI();
    EulerTriple::new(-q, T::one(), q)
}
