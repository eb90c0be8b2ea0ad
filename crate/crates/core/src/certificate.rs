//! The reachability certificate f and its SVD-coordinate form f_z.
//!
//! f(X) = (x1 - x4)^2 - (x2 - x3)^2 in the parametrization
//! X = [[x1+x3, x2+x4], [x4-x2, x1-x3]]. Along any trajectory of the
//! hyperbolic normal form dS/dt = (-K_x + b K_z + u K_y) S it is
//! non-decreasing and starts at 1, so f >= 1 certifies membership in the
//! closure of the reachable set and f < 1 certifies unreachability.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, BasisCoords, SymplecticMatrix};
use crate::error::{Result, Sp2Error};
use crate::euler::EulerTriple;
use crate::mat2::Mat2;
use crate::scalar::Real;

/// Sub-samples taken inside each constant-control slice when tracing f.
pub const TRAJECTORY_SAMPLES_PER_SLICE: usize = 50;

/// The (x1, x2, x3, x4) parametrization of a real 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XCoords<T> {
    pub x1: T,
    pub x2: T,
    pub x3: T,
    pub x4: T,
}

impl<T: Real> XCoords<T> {
    pub fn from_mat(m: &Mat2<T>) -> Self {
        let h = T::half();
        Self {
            x1: (m.m11 + m.m22) * h,
            x2: (m.m12 - m.m21) * h,
            x3: (m.m11 - m.m22) * h,
            x4: (m.m12 + m.m21) * h,
        }
    }

    pub fn to_mat(&self) -> Mat2<T> {
        Mat2::new(
            self.x1 + self.x3,
            self.x2 + self.x4,
            self.x4 - self.x2,
            self.x1 - self.x3,
        )
    }
}

/// f(X) = (x1 - x4)^2 - (x2 - x3)^2.
pub fn f_of_matrix<T: Real>(m: &Mat2<T>) -> T {
    let x = XCoords::from_mat(m);
    let a = x.x1 - x.x4;
    let b = x.x2 - x.x3;
    a * a - b * b
}

/// g(z, phi) = (z^2 + 1/z^2)/2 sin(2 phi) - (z^2 - 1/z^2)/2, for z >= 1.
pub fn g_factor<T: Real>(z: T, phi: T) -> Result<T> {
    if z < T::one() {
        return Err(Sp2Error::Domain(format!("g_factor requires z >= 1, got {z}")));
    }
    let z2 = z * z;
    let iz2 = z2.recip();
    Ok(T::half() * ((z2 + iz2) * (T::two() * phi).sin() - (z2 - iz2)))
}

/// f in SVD coordinates: f_z = cos(2 theta) cos(2 phi) - g(z, phi) sin(2 theta).
pub fn fz_of_triple<T: Real>(e: &EulerTriple<T>) -> Result<T> {
    let g = g_factor(e.zed, e.phi)?;
    let two = T::two();
    Ok((two * e.theta).cos() * (two * e.phi).cos() - g * (two * e.theta).sin())
}

/// Equivalent compact form cos(2(theta + phi)) - delta sin(2 theta) with
/// delta = g - sin(2 phi); used by the inequality arguments and checked
/// against `fz_of_triple` in tests.
pub fn fz_compact<T: Real>(e: &EulerTriple<T>) -> Result<T> {
    let delta = g_factor(e.zed, e.phi)? - (T::two() * e.phi).sin();
    Ok((T::two() * (e.theta + e.phi)).cos() - delta * (T::two() * e.theta).sin())
}

/// Strict lower bound on z for any symplectic with f_z > d: sqrt((d+1)/2).
pub fn min_z_for_f<T: Real>(d: T) -> Result<T> {
    if d < T::one() {
        return Err(Sp2Error::Domain(format!("min_z_for_f requires d >= 1, got {d}")));
    }
    Ok(((d + T::one()) * T::half()).sqrt())
}

/// Test predicate for the squeeze-gain condition: f_z exceeding its z = 1
/// value implies z > 1 and sin(2 theta) > 0.
pub fn sin2theta_sign_check<T: Real>(e: &EulerTriple<T>) -> Result<bool> {
    let fz = fz_of_triple(e)?;
    let f1 = fz_of_triple(&EulerTriple::new(e.theta, T::one(), e.phi))?;
    if fz > f1 + T::of(1e-12) {
        Ok(e.zed > T::one() && (T::two() * e.theta).sin() > T::zero())
    } else {
        Ok(true)
    }
}

/// Analytic rate of change of f along the normal-form flow at matrix X:
/// df/dt = 2b (x1-x4)(x2-x3) + (x1-x4)^2 + (x2-x3)^2.
///
/// The control term cancels, so the rate is pulse-independent.
pub fn f_rate<T: Real>(b: T, m: &Mat2<T>) -> T {
    let x = XCoords::from_mat(m);
    let p = x.x1 - x.x4;
    let q = x.x2 - x.x3;
    T::two() * b * p * q + p * p + q * q
}

/// Samples f along the piecewise-constant evolution of the normal form
/// dS/dt = (-K_x + b K_z + u_k K_y) S, S(0) = I, with
/// `TRAJECTORY_SAMPLES_PER_SLICE` points inside each slice.
///
/// Returns `values.len() * samples + 1` entries, starting at f(I) = 1.
pub fn f_along_trajectory<T: Real>(b: T, pulse_values: &[T], total_time: T) -> Vec<T> {
    let samples = TRAJECTORY_SAMPLES_PER_SLICE;
    let dt = total_time / T::of(pulse_values.len() as f64);
    let sub = dt / T::of(samples as f64);
    let mut out = Vec::with_capacity(pulse_values.len() * samples + 1);
    let mut s = SymplecticMatrix::<T>::identity();
    out.push(f_of_matrix(&s.mat()));
    for &u in pulse_values {
        let gen = normal_form_generator(b, u);
        let step = gen.expm(sub);
        for _ in 0..samples {
            s = step.compose(&s);
            out.push(f_of_matrix(&s.mat()));
        }
    }
    out
}

/// The normal-form generator -K_x + b K_z + u K_y.
pub fn normal_form_generator<T: Real>(b: T, u: T) -> AlgebraElement<T> {
    AlgebraElement::from_coords(BasisCoords::new(-T::one(), u, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::compose;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn f_of_identity_is_one() {
        assert_eq!(f_of_matrix(&Mat2::<f64>::identity()), 1.0);
    }

    #[test]
    fn f_of_quarter_rotation_is_minus_one() {
        let r = Mat2::<f64>::rotation(FRAC_PI_2);
        assert!((f_of_matrix(&r) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn xcoords_bijection() {
        let m = Mat2::new(1.3, -0.2, 0.8, 2.1);
        assert!((XCoords::from_mat(&m).to_mat() - m).frobenius_norm() < 1e-15);
    }

    #[test]
    fn f_nonnegative_along_drift() {
        // exp of the normal-form drift alone stays at f >= 1
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let t = rng.gen_range(0.0..5.0);
            let s = normal_form_generator(0.0, 0.0).expm(t);
            assert!(f_of_matrix(&s.mat()) >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn g_factor_values() {
        assert!((g_factor(1.0, 0.3).unwrap() - (0.6f64).sin()).abs() < 1e-15);
        assert!((g_factor(2.0, PI / 4.0).unwrap() - 0.25).abs() < 1e-12);
        assert!(g_factor(0.5, 0.0).is_err());
    }

    #[test]
    fn delta_vanishes_at_unit_z() {
        for phi in [0.0f64, 0.7, 2.0] {
            let d = g_factor(1.0, phi).unwrap() - (2.0 * phi).sin();
            assert!(d.abs() < 1e-15);
        }
    }

    #[test]
    fn fz_at_identity_limit_is_one() {
        let e = crate::euler::identity_limit_triple::<f64>();
        assert!((fz_of_triple(&e).unwrap() - 1.0).abs() < 1e-12);
        assert!((f_of_matrix(&compose(&e).mat()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fz_canonical_squeezer() {
        let e = EulerTriple::new(0.0f64, 3.0, 0.0);
        assert!((fz_of_triple(&e).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fz_matches_matrix_form() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let e = EulerTriple::new(
                rng.gen_range(-PI..PI),
                rng.gen_range(1.0..50.0),
                rng.gen_range(0.0..PI),
            );
            let via_matrix = f_of_matrix(&compose(&e).mat());
            let via_triple = fz_of_triple(&e).unwrap();
            let scale = 1.0 + via_matrix.abs();
            assert!((via_matrix - via_triple).abs() < 1e-10 * scale, "{e:?}");
        }
    }

    #[test]
    fn compact_form_matches_expansion() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let e = EulerTriple::new(
                rng.gen_range(-PI..PI),
                rng.gen_range(1.0..20.0),
                rng.gen_range(0.0..PI),
            );
            let a = fz_of_triple(&e).unwrap();
            let b = fz_compact(&e).unwrap();
            assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn min_z_bound_values() {
        assert!((min_z_for_f(1.0f64).unwrap() - 1.0).abs() < 1e-15);
        assert!((min_z_for_f(7.0f64).unwrap() - 2.0).abs() < 1e-15);
        assert!(min_z_for_f(0.5f64).is_err());
    }

    #[test]
    fn sign_check_cases() {
        // sin(2 theta) > 0 region
        let e = EulerTriple::new(-0.75 * PI + 0.1, 2.0, 0.75 * PI);
        assert!((2.0 * e.theta).sin() > 0.0);
        assert!(sin2theta_sign_check(&e).unwrap());
        // sin(2 theta) < 0: f_z must not exceed the z = 1 value
        let e = EulerTriple::new(PI / 4.0 + FRAC_PI_2, 2.0, 0.0);
        assert!((2.0 * e.theta).sin() < 0.0);
        let fz = fz_of_triple(&e).unwrap();
        let f1 = fz_of_triple(&EulerTriple::new(e.theta, 1.0, e.phi)).unwrap();
        assert!(fz <= f1 + 1e-12);
        assert!(sin2theta_sign_check(&e).unwrap());
        // z = 1 trivially passes
        assert!(sin2theta_sign_check(&EulerTriple::new(0.3, 1.0, 0.4)).unwrap());
    }

    #[test]
    fn trajectory_starts_at_one_and_never_decreases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let b = rng.gen_range(-0.99..0.99);
            let pulse: Vec<f64> = (0..10).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let trace = f_along_trajectory(b, &pulse, 2.0);
            assert!((trace[0] - 1.0).abs() < 1e-14);
            for w in trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-9, "f decreased: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn initial_rate_is_one() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let b = rng.gen_range(-0.99..0.99);
            let pulse: Vec<f64> = (0..10).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let trace = f_along_trajectory(b, &pulse, 2.0);
            let h = 2.0 / (10.0 * TRAJECTORY_SAMPLES_PER_SLICE as f64);
            // second-order forward difference: first-order is only O(h) accurate
            let slope = (4.0 * trace[1] - trace[2] - 3.0 * trace[0]) / (2.0 * h);
            assert!((slope - 1.0).abs() < 1e-3, "slope {slope}");
        }
    }

    #[test]
    fn analytic_rate_matches_finite_difference() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let b: f64 = rng.gen_range(-0.99..0.99);
            let u = rng.gen_range(-5.0..5.0);
            let t = rng.gen_range(0.0..2.0);
            let s = normal_form_generator(b, u).expm(t);
            let rate = f_rate(b, &s.mat());
            let h = 1e-6;
            let gen = normal_form_generator(b, u);
            let fp = f_of_matrix(&gen.expm(h).compose(&s).mat());
            let fm = f_of_matrix(&gen.expm(-h).compose(&s).mat());
            let fd = (fp - fm) / (2.0 * h);
            assert!(
                (rate - fd).abs() <= 1e-5 * (1.0 + fd.abs()),
                "analytic {rate} vs fd {fd}"
            );
        }
    }
}
