//! Self-check suites over the library's analytic invariants, exposed
//! through the `verify` CLI subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::algebra::{rank_criterion, AlgebraElement, BasisCoords, StabilityClass};
use crate::certificate::{f_along_trajectory, f_of_matrix, fz_of_triple, min_z_for_f};
use crate::euler::{compose, decompose, EulerTriple, RangeOffsets};
use crate::normal_form::{hyperbolic_to_ky, is_unstable, normalize, ControlSystem};
use crate::pulse::{gradient, propagate, Pulse, PulseProblem};

/// Outcome of one property check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub samples: usize,
    pub failures: usize,
    pub detail: String,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

fn random_algebra(rng: &mut ChaCha8Rng, scale: f64) -> AlgebraElement<f64> {
    AlgebraElement::from_coords(BasisCoords::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    ))
}

fn random_triple(rng: &mut ChaCha8Rng, z_max: f64) -> EulerTriple<f64> {
    let z = z_max.powf(rng.gen_range(0.0..1.0f64));
    EulerTriple::new(rng.gen_range(-PI..PI), z, rng.gen_range(0.0..PI))
}

/// Runs every suite; all seeds are fixed so the report is reproducible.
pub fn verify_suite() -> VerifyReport {
    let mut report = VerifyReport::default();
    report.checks.push(check_trace_identity());
    report.checks.push(check_structure_constants());
    report.checks.push(check_expm_group_law());
    report.checks.push(check_classify_conjugation());
    report.checks.push(check_euler_round_trip());
    report.checks.push(check_certificate_oracle());
    report.checks.push(check_min_z_bound());
    report.checks.push(check_hyperbolic_conversion());
    report.checks.push(check_monotonicity());
    report.checks.push(check_normal_form_soundness());
    report.checks.push(check_gradient_fd());
    report
}

fn check_trace_identity() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let n = 10_000;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let m = random_algebra(&mut rng, 5.0);
        let k = random_algebra(&mut rng, 5.0);
        let scale = m.mat().frobenius_norm().max(k.mat().frobenius_norm());
        let r = m.trace_identity_residual(&k).abs();
        worst = worst.max(r);
        if r > 1e-9 * (1.0 + scale.powi(4)) {
            failures += 1;
        }
    }
    CheckResult {
        name: "trace identity Tr[[M,N]^2] = 2Tr[MN]^2 - 2Tr[M^2]Tr[N^2]",
        samples: n,
        failures,
        detail: format!("worst residual {worst:.2e}"),
    }
}

fn check_structure_constants() -> CheckResult {
    let kx = AlgebraElement::<f64>::k_x();
    let ky = AlgebraElement::<f64>::k_y();
    let kz = AlgebraElement::<f64>::k_z();
    let cases = [
        (kx.commutator(&ky), kz.neg()),
        (ky.commutator(&kz), kx),
        (kz.commutator(&kx), ky),
    ];
    let failures = cases
        .iter()
        .filter(|(got, want)| (got.mat() - want.mat()).frobenius_norm() > 0.0)
        .count();
    CheckResult {
        name: "basis structure constants",
        samples: 3,
        failures,
        detail: "exact".into(),
    }
}

fn check_expm_group_law() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let n = 2_000;
    let mut failures = 0;
    for _ in 0..n {
        let m = random_algebra(&mut rng, 10.0);
        let t1 = rng.gen_range(-2.0..2.0);
        let t2 = rng.gen_range(-2.0..2.0);
        let a = m.expm(t1).mat();
        let b = m.expm(t2).mat();
        let lhs = a * b;
        let rhs = m.expm(t1 + t2).mat();
        // cancellation in the product loses digits relative to the factors
        let scale = 1.0 + a.frobenius_norm() * b.frobenius_norm();
        if (lhs - rhs).frobenius_norm() > 1e-10 * scale {
            failures += 1;
        }
        if (m.expm(t1).mat().det() - 1.0).abs() > 1e-10 * (1.0 + m.expm(t1).mat().frobenius_norm())
        {
            failures += 1;
        }
    }
    CheckResult {
        name: "one-parameter group law and det = 1",
        samples: n,
        failures,
        detail: String::new(),
    }
}

fn check_classify_conjugation() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let n = 2_000;
    let mut failures = 0;
    for _ in 0..n {
        let m = random_algebra(&mut rng, 3.0);
        if m.classify() == StabilityClass::Parabolic {
            continue;
        }
        let p = random_algebra(&mut rng, 1.5).expm(rng.gen_range(-1.0..1.0));
        if p.conjugate_algebra(&m).classify() != m.classify() {
            failures += 1;
        }
    }
    CheckResult {
        name: "classification invariant under symplectic conjugation",
        samples: n,
        failures,
        detail: String::new(),
    }
}

fn check_euler_round_trip() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let off = RangeOffsets::default();
    let n = 10_000;
    let mut failures = 0;
    for _ in 0..n {
        let e = EulerTriple::new(
            rng.gen_range(-PI..PI),
            1.0 + rng.gen_range(1e-6..99.0),
            rng.gen_range(0.0..PI),
        );
        let s = compose(&e);
        match decompose(&s, &off) {
            Ok(back) => {
                let ok = (back.theta - e.theta).abs() < 1e-9 * (1.0 + e.zed)
                    && (back.zed - e.zed).abs() < 1e-9 * e.zed
                    && (back.phi - e.phi).abs() < 1e-9 * (1.0 + e.zed);
                let recon = (compose(&back).mat() - s.mat()).frobenius_norm();
                if !ok || recon > 1e-10 * s.mat().frobenius_norm() {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    CheckResult {
        name: "Euler decomposition round trip and reconstruction",
        samples: n,
        failures,
        detail: String::new(),
    }
}

fn check_certificate_oracle() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let n = 100_000;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let e = random_triple(&mut rng, 100.0);
        let via_matrix = f_of_matrix(&compose(&e).mat());
        let via_triple = fz_of_triple(&e).expect("z >= 1");
        let gap = (via_matrix - via_triple).abs();
        let scale = 1.0 + via_matrix.abs();
        worst = worst.max(gap / scale);
        if gap > 1e-10 * scale {
            failures += 1;
        }
    }
    CheckResult {
        name: "certificate coordinate-change oracle f == f_z",
        samples: n,
        failures,
        detail: format!("worst relative gap {worst:.2e}"),
    }
}

fn check_min_z_bound() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let n = 100_000;
    let mut failures = 0;
    for &d in &[1.0, 2.0, 3.0, 7.0] {
        let bound = min_z_for_f(d).unwrap();
        for _ in 0..n / 4 {
            let e = random_triple(&mut rng, 100.0);
            let fz = fz_of_triple(&e).unwrap();
            if fz > d && e.zed <= bound - 1e-9 {
                failures += 1;
            }
        }
    }
    CheckResult {
        name: "squeeze lower bound z > sqrt((d+1)/2) whenever f_z > d",
        samples: n,
        failures,
        detail: String::new(),
    }
}

fn check_hyperbolic_conversion() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    let n = 10_000;
    let mut failures = 0;
    let mut tried = 0;
    while tried < n {
        let m = random_algebra(&mut rng, 5.0);
        if m.classify() != StabilityClass::Hyperbolic {
            continue;
        }
        tried += 1;
        let (p, scale) = match hyperbolic_to_ky(&m) {
            Ok(v) => v,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let want = AlgebraElement::k_y().scale(scale);
        let gap = (p.conjugate_algebra(&m).mat() - want.mat()).frobenius_norm();
        if gap > 1e-10 * (1.0 + m.mat().frobenius_norm()) {
            failures += 1;
        }
        if (p.mat().det() - 1.0).abs() > 1e-10 {
            failures += 1;
        }
    }
    CheckResult {
        name: "hyperbolic conjugation onto sqrt(2 Tr[M^2]) K_y",
        samples: n,
        failures,
        detail: String::new(),
    }
}

fn check_monotonicity() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let n = 200;
    let mut failures = 0;
    for _ in 0..n {
        let b = rng.gen_range(-0.99..0.99);
        let pulse: Vec<f64> = (0..10).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let t = rng.gen_range(0.1..2.0);
        let trace = f_along_trajectory(b, &pulse, t);
        if (trace[0] - 1.0).abs() > 1e-12 {
            failures += 1;
            continue;
        }
        if trace.windows(2).any(|w| w[1] < w[0] - 1e-9) {
            failures += 1;
        }
    }
    CheckResult {
        name: "certificate monotone along normal-form trajectories",
        samples: n,
        failures,
        detail: String::new(),
    }
}

fn check_normal_form_soundness() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let n = 1_000;
    let mut failures = 0;
    let mut tried = 0;
    while tried < n {
        let sys = ControlSystem::new(random_algebra(&mut rng, 3.0), random_algebra(&mut rng, 3.0));
        if !is_unstable(&sys) || !rank_criterion(&sys.drift, &sys.control) {
            continue;
        }
        tried += 1;
        let nf = match normalize(&sys) {
            Ok(v) => v,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        if nf.b.abs() >= 1.0 {
            failures += 1;
            continue;
        }
        let back = nf.reconstruct();
        let da = back.drift.to_basis_coords();
        let oa = sys.drift.to_basis_coords();
        let db = back.control.to_basis_coords();
        let ob = sys.control.to_basis_coords();
        let scale = 1.0 + oa.norm() + ob.norm();
        let gap = (da.x - oa.x).abs().max((da.y - oa.y).abs()).max((da.z - oa.z).abs())
            .max((db.x - ob.x).abs())
            .max((db.y - ob.y).abs())
            .max((db.z - ob.z).abs());
        if gap > 1e-9 * scale {
            failures += 1;
        }
    }
    CheckResult {
        name: "normal form |b| < 1 and reconstruction",
        samples: n,
        failures,
        detail: String::new(),
    }
}

fn check_gradient_fd() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let n = 20;
    let mut failures = 0;
    for _ in 0..n {
        let c = rng.gen_range(-0.9..0.9);
        let t = rng.gen_range(0.2..3.0);
        let sys = ControlSystem::example(c);
        let target = compose(&random_triple(&mut rng, 5.0));
        let mut problem = PulseProblem::new(sys, target, t);
        problem.slices = 10;
        let pulse = Pulse::new((0..10).map(|_| rng.gen_range(-2.0..2.0)).collect(), t);
        let g = gradient(&problem, &pulse);
        let h = 1e-6;
        for k in 0..10 {
            let mut up = pulse.clone();
            up.values[k] += h;
            let mut dn = pulse.clone();
            dn.values[k] -= h;
            let fd = (crate::pulse::fidelity_error(&propagate(&problem.system, &up), &problem.target)
                - crate::pulse::fidelity_error(&propagate(&problem.system, &dn), &problem.target))
                / (2.0 * h);
            if (g[k] - fd).abs() > 1e-6 * (1.0 + fd.abs()) {
                failures += 1;
            }
        }
    }
    CheckResult {
        name: "augmented-matrix gradient vs central finite differences",
        samples: n * 10,
        failures,
        detail: String::new(),
    }
}
