//! Property-based tests: algebraic identities and decomposition round trips
//! over randomly sampled inputs.

use std::f64::consts::PI;

use proptest::prelude::*;

use sp2control::algebra::rank_criterion;
use sp2control::certificate;
use sp2control::euler;
use sp2control::{Algebra, Coords, Euler, Offsets};

fn coords_strategy() -> impl Strategy<Value = Coords> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, z)| Coords::new(x, y, z))
}

/// Canonical-range triples away from the degenerate z = 1 plane and from the
/// range endpoints, where wrap-around makes equality comparisons ill-posed.
fn interior_triple() -> impl Strategy<Value = Euler> {
    (
        (-PI + 1e-3)..(PI - 1e-3),
        1.01..50.0f64,
        1e-3..(PI - 1e-3),
    )
        .prop_map(|(theta, z, phi)| Euler::new(theta, z, phi))
}

proptest! {
    #[test]
    fn exponentials_have_unit_determinant(c in coords_strategy(), t in -3.0..3.0f64) {
        let m = Algebra::from_coords(c);
        let s = m.expm(t).mat();
        prop_assert!((s.det() - 1.0).abs() < 1e-9 * (1.0 + s.frobenius_norm().powi(2)));
    }

    #[test]
    fn group_law_holds(c in coords_strategy(), t1 in -2.0..2.0f64, t2 in -2.0..2.0f64) {
        let m = Algebra::from_coords(c);
        let a = m.expm(t1).mat();
        let b = m.expm(t2).mat();
        let lhs = a * b;
        let rhs = m.expm(t1 + t2).mat();
        let scale = 1.0 + a.frobenius_norm() * b.frobenius_norm();
        prop_assert!((lhs - rhs).frobenius_norm() / scale < 1e-10);
    }

    #[test]
    fn trace_identity_residual_vanishes(c1 in coords_strategy(), c2 in coords_strategy()) {
        let m = Algebra::from_coords(c1);
        let n = Algebra::from_coords(c2);
        let scale = 1.0 + (m.trace_sq().abs() + n.trace_sq().abs()).powi(2);
        prop_assert!(m.trace_identity_residual(&n).abs() < 1e-10 * scale);
    }

    #[test]
    fn coordinates_round_trip(c in coords_strategy()) {
        let back = Algebra::from_coords(c).to_basis_coords();
        prop_assert!((back.x - c.x).abs() < 1e-12);
        prop_assert!((back.y - c.y).abs() < 1e-12);
        prop_assert!((back.z - c.z).abs() < 1e-12);
    }

    #[test]
    fn euler_round_trip(e in interior_triple()) {
        let s = euler::compose(&e);
        let d = euler::decompose(&s, &Offsets::default()).unwrap();
        // z = 50 pushes entries of S S^T to ~2.5e3; angles lose a few digits.
        prop_assert!((d.theta - e.theta).abs() < 1e-7, "theta {} vs {}", d.theta, e.theta);
        prop_assert!((d.zed - e.zed).abs() / e.zed < 1e-9, "z {} vs {}", d.zed, e.zed);
        prop_assert!((d.phi - e.phi).abs() < 1e-7, "phi {} vs {}", d.phi, e.phi);
    }

    #[test]
    fn decomposition_lands_in_canonical_ranges(
        e in interior_triple(),
        c in coords_strategy(),
        t in -1.0..1.0f64,
    ) {
        // scramble with an extra group element so the input is generic
        let s = euler::compose(&e).compose(&Algebra::from_coords(c).expm(t));
        let d = euler::decompose(&s, &Offsets::default()).unwrap();
        prop_assert!(d.zed >= 1.0 - 1e-12);
        prop_assert!((-PI..PI).contains(&d.theta) || (d.theta - PI).abs() < 1e-9);
        prop_assert!((0.0..PI).contains(&d.phi) || d.phi.abs() < 1e-9 || d.zed < 1.0 + 1e-9);
        let back = euler::compose(&d);
        let scale = 1.0 + s.mat().frobenius_norm();
        prop_assert!((back.mat() - s.mat()).frobenius_norm() / scale < 1e-9);
    }

    #[test]
    fn certificate_forms_agree(e in interior_triple()) {
        let s = euler::compose(&e);
        let f = certificate::f_of_matrix(&s.mat());
        let fz = certificate::fz_of_triple(&e).unwrap();
        let scale = 1.0 + f.abs();
        prop_assert!((f - fz).abs() / scale < 1e-10, "f {f} vs fz {fz}");
        // Lemma bound: f never exceeds z^2
        prop_assert!(f <= e.zed * e.zed * (1.0 + 1e-12));
    }

    #[test]
    fn rotations_satisfy_f_at_most_one(theta in -PI..PI) {
        let r = sp2control::Symplectic::rotation(theta);
        let f = certificate::f_of_matrix(&r.mat());
        prop_assert!((f - (2.0 * theta).cos()).abs() < 1e-12);
        prop_assert!(f <= 1.0 + 1e-12);
    }

    #[test]
    fn controllability_rank_criterion_detects_collinearity(
        c in coords_strategy(),
        s in -3.0..3.0f64,
    ) {
        prop_assume!(c.norm() > 1e-6);
        let m = Algebra::from_coords(c);
        // a scaled copy spans no new direction
        prop_assert!(!rank_criterion(&m, &m.scale(s)));
    }
}
