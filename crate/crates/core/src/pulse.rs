//! Piecewise-constant pulse optimization over Sp(2,R).
//!
//! The evolution time T is split into Q equal slices with constant
//! control u_k; the slice propagator is the closed-form exponential of
//! (A + u_k B) dt and the full evolution is the latest-leftmost product
//! S(T) = S_Q ... S_1. The objective is the Frobenius fidelity error
//! eps = (1/8) ||S(T) - S_target||_F^2, minimised by a bound-constrained
//! limited-memory quasi-Newton descent with exact gradients from the
//! augmented-matrix (Frechet derivative) method.

use std::collections::VecDeque;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::SymplecticMatrix;
use crate::mat2::Mat2;
use crate::normal_form::ControlSystem;

/// Fidelity-error normalisation for 2x2 matrices.
pub const FIDELITY_LAMBDA: f64 = 0.125;

const LBFGS_MEMORY: usize = 10;
const GRAD_NORM_STOP: f64 = 1e-8;
const MAX_ITERATIONS: usize = 2000;
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;

/// A piecewise-constant control: Q values over total time T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub values: Vec<f64>,
    pub total_time: f64,
}

impl Pulse {
    pub fn new(values: Vec<f64>, total_time: f64) -> Self {
        assert!(!values.is_empty() && total_time > 0.0);
        Self { values, total_time }
    }

    pub fn zero(slices: usize, total_time: f64) -> Self {
        Self::new(vec![0.0; slices], total_time)
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.values.len() as f64
    }
}

/// A pulse optimization instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseProblem {
    pub system: ControlSystem<f64>,
    pub target: SymplecticMatrix<f64>,
    pub total_time: f64,
    pub slices: usize,
    pub u_bounds: (f64, f64),
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Wall-clock budget per start, in seconds.
    pub wall_limit: f64,
}

impl PulseProblem {
    pub fn new(system: ControlSystem<f64>, target: SymplecticMatrix<f64>, total_time: f64) -> Self {
        Self {
            system,
            target,
            total_time,
            slices: 10,
            u_bounds: (-20.0, 20.0),
            tol: 1e-3,
            restarts: 5,
            seed: 0,
            wall_limit: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptimStatus {
    Reached,
    LocalMinimum,
    TimeLimit,
}

impl std::fmt::Display for OptimStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            OptimStatus::Reached => "reached",
            OptimStatus::LocalMinimum => "local_minimum",
            OptimStatus::TimeLimit => "time_limit",
        };
        write!(f, "{s}")
    }
}

/// Best outcome over all restarts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub status: OptimStatus,
    pub epsilon: f64,
    pub pulse: Pulse,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Product of per-slice exponentials, latest leftmost.
pub fn propagate(system: &ControlSystem<f64>, pulse: &Pulse) -> SymplecticMatrix<f64> {
    let dt = pulse.dt();
    let mut s = SymplecticMatrix::identity();
    for &u in &pulse.values {
        s = system.generator(u).expm(dt).compose(&s);
    }
    s
}

/// The per-slice propagators S_1 .. S_Q.
pub fn slice_propagators(system: &ControlSystem<f64>, pulse: &Pulse) -> Vec<SymplecticMatrix<f64>> {
    let dt = pulse.dt();
    pulse
        .values
        .iter()
        .map(|&u| system.generator(u).expm(dt))
        .collect()
}

/// eps = lambda ||S - target||_F^2 with lambda = 1/8.
pub fn fidelity_error(s: &SymplecticMatrix<f64>, target: &SymplecticMatrix<f64>) -> f64 {
    let d = s.mat() - target.mat();
    let n = d.frobenius_norm();
    FIDELITY_LAMBDA * n * n
}

// ---------------------------------------------------------------------------
// Augmented-matrix Frechet derivative
// ---------------------------------------------------------------------------

/// Dense 4x4 matrix, only used for the block [[M, E], [0, M]] exponential.
type Mat4 = [[f64; 4]; 4];

fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..4 {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

fn mat4_norm1(a: &Mat4) -> f64 {
    (0..4)
        .map(|j| (0..4).map(|i| a[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Scaling-and-squaring Taylor exponential of a 4x4 matrix.
fn mat4_expm(a: &Mat4) -> Mat4 {
    let norm = mat4_norm1(a);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(s);
    let mut b = *a;
    for row in &mut b {
        for v in row {
            *v *= scale;
        }
    }
    // Taylor series; ||B|| <= 0.5 so terms decay fast
    let mut result = [[0.0; 4]; 4];
    for (i, row) in result.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut term = result;
    for k in 1..=20 {
        term = mat4_mul(&term, &b);
        let inv = 1.0 / k as f64;
        let mut max_entry: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                term[i][j] *= inv;
                result[i][j] += term[i][j];
                max_entry = max_entry.max(term[i][j].abs());
            }
        }
        if max_entry < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = mat4_mul(&result, &result);
    }
    result
}

/// Frechet derivative of exp at M in direction E via the augmented block
/// matrix exp([[M, E], [0, M]]) = [[exp(M), L], [0, exp(M)]].
pub fn expm_frechet(m: &Mat2<f64>, e: &Mat2<f64>) -> Mat2<f64> {
    let aug: Mat4 = [
        [m.m11, m.m12, e.m11, e.m12],
        [m.m21, m.m22, e.m21, e.m22],
        [0.0, 0.0, m.m11, m.m12],
        [0.0, 0.0, m.m21, m.m22],
    ];
    let x = mat4_expm(&aug);
    Mat2::new(x[0][2], x[0][3], x[1][2], x[1][3])
}

/// Exact gradient of the fidelity error with respect to each u_k.
///
/// Forward and backward slice products are cached so the assembly costs
/// O(Q) matrix exponentials per call.
pub fn gradient(problem: &PulseProblem, pulse: &Pulse) -> Vec<f64> {
    let q = pulse.values.len();
    let dt = pulse.dt();
    let slices = slice_propagators(&problem.system, pulse);

    // forward[k] = S_k ... S_1 (forward[0] = I)
    let mut forward = Vec::with_capacity(q + 1);
    forward.push(Mat2::identity());
    for s in &slices {
        let prev = *forward.last().unwrap();
        forward.push(s.mat() * prev);
    }
    // backward[k] = S_Q ... S_{k+1} (backward[q] = I)
    let mut backward = vec![Mat2::identity(); q + 1];
    for k in (0..q).rev() {
        backward[k] = backward[k + 1] * slices[k].mat();
    }

    let diff = forward[q] - problem.target.mat();
    let e_dir = problem.system.control.mat().scale(dt);

    (0..q)
        .map(|k| {
            let m = problem.system.generator(pulse.values[k]).mat().scale(dt);
            let dslice = expm_frechet(&m, &e_dir);
            let dtotal = backward[k + 1] * dslice * forward[k];
            // d eps / d u_k = 2 lambda Tr[diff^T dtotal]
            let tr = diff.m11 * dtotal.m11
                + diff.m12 * dtotal.m12
                + diff.m21 * dtotal.m21
                + diff.m22 * dtotal.m22;
            2.0 * FIDELITY_LAMBDA * tr
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Bounded limited-memory quasi-Newton descent
// ---------------------------------------------------------------------------

fn project(x: &mut [f64], lo: f64, hi: f64) {
    for v in x.iter_mut() {
        *v = v.clamp(lo, hi);
    }
}

/// Gradient with components pointing out of the feasible box zeroed.
fn projected_gradient(x: &[f64], g: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| {
            if (xi <= lo && gi > 0.0) || (xi >= hi && gi < 0.0) {
                0.0
            } else {
                gi
            }
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct StartOutcome {
    status: OptimStatus,
    epsilon: f64,
    x: Vec<f64>,
    iterations: usize,
    grad_norm: f64,
}

fn run_start(problem: &PulseProblem, x0: Vec<f64>, deadline: Instant) -> StartOutcome {
    let (lo, hi) = problem.u_bounds;
    let eval = |x: &[f64]| {
        let pulse = Pulse::new(x.to_vec(), problem.total_time);
        let s = propagate(&problem.system, &pulse);
        fidelity_error(&s, &problem.target)
    };
    let grad = |x: &[f64]| {
        let pulse = Pulse::new(x.to_vec(), problem.total_time);
        gradient(problem, &pulse)
    };

    let mut x = x0;
    project(&mut x, lo, hi);
    let mut f = eval(&x);
    let mut g = grad(&x);
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;

    loop {
        let pg = projected_gradient(&x, &g, lo, hi);
        let pg_norm = norm(&pg);
        if f < problem.tol {
            return StartOutcome {
                status: OptimStatus::Reached,
                epsilon: f,
                x,
                iterations,
                grad_norm: pg_norm,
            };
        }
        if pg_norm < GRAD_NORM_STOP {
            return StartOutcome {
                status: OptimStatus::LocalMinimum,
                epsilon: f,
                x,
                iterations,
                grad_norm: pg_norm,
            };
        }
        if iterations >= MAX_ITERATIONS || Instant::now() >= deadline {
            return StartOutcome {
                status: OptimStatus::TimeLimit,
                epsilon: f,
                x,
                iterations,
                grad_norm: pg_norm,
            };
        }
        iterations += 1;

        // two-loop recursion on the projected gradient
        let mut d: Vec<f64> = pg.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(memory.len());
        for (s, y, rho) in memory.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = memory.back() {
            let gamma = dot(s, y) / dot(y, y);
            if gamma.is_finite() && gamma > 0.0 {
                for di in d.iter_mut() {
                    *di *= gamma;
                }
            }
        }
        for ((s, y, rho), a) in memory.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        if dot(&d, &pg) >= 0.0 {
            // not a descent direction: fall back to steepest descent
            memory.clear();
            d = pg.iter().map(|v| -v).collect();
        }

        // projected backtracking line search; the Armijo model uses the
        // actual (post-projection) step so truncation at a bound still
        // admits acceptable points
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let mut xt: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            project(&mut xt, lo, hi);
            let step: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
            let model = dot(&g, &step);
            if model >= 0.0 {
                // projected step is not a descent step; shrink
                alpha *= 0.5;
                continue;
            }
            let ft = eval(&xt);
            if ft <= f + ARMIJO_C1 * model {
                accepted = Some((xt, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            return StartOutcome {
                status: OptimStatus::LocalMinimum,
                epsilon: f,
                x,
                iterations,
                grad_norm: pg_norm,
            };
        };

        let g_new = grad(&x_new);
        let s_vec: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y_vec: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s_vec, &y_vec);
        if sy > 1e-10 * norm(&s_vec) * norm(&y_vec) {
            if memory.len() == LBFGS_MEMORY {
                memory.pop_front();
            }
            memory.push_back((s_vec, y_vec, 1.0 / sy));
        }
        x = x_new;
        f = f_new;
        g = g_new;
    }
}

/// RNG stream for one restart, derived deterministically from (seed, index).
fn start_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mixed = seed
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(index as u64 + 1);
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Multi-start bounded quasi-Newton minimisation of the fidelity error.
///
/// Failure to reach the target is a status, not an error; the best start
/// (lowest final infidelity) is reported.
pub fn optimize(problem: &PulseProblem) -> OptimResult {
    let mut best: Option<StartOutcome> = None;
    let mut total_iterations = 0;
    for start in 0..problem.restarts.max(1) {
        let mut rng = start_rng(problem.seed, start);
        let x0: Vec<f64> = (0..problem.slices)
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect();
        let deadline = Instant::now() + std::time::Duration::from_secs_f64(problem.wall_limit);
        let outcome = run_start(problem, x0, deadline);
        total_iterations += outcome.iterations;
        let better = match &best {
            None => true,
            Some(b) => outcome.epsilon < b.epsilon,
        };
        if better {
            best = Some(outcome);
        }
        if best.as_ref().map(|b| b.status) == Some(OptimStatus::Reached) {
            break;
        }
    }
    let best = best.expect("at least one start runs");
    OptimResult {
        status: best.status,
        epsilon: best.epsilon,
        pulse: Pulse::new(best.x, problem.total_time),
        iterations: total_iterations,
        grad_norm: best.grad_norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{compose, EulerTriple};
    use rand::Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn zero_pulse_matches_drift_exponential() {
        let sys = ControlSystem::example(0.0);
        let pulse = Pulse::zero(10, 1.0);
        let got = propagate(&sys, &pulse).mat();
        let want = sys.drift.expm(1.0).mat();
        assert!((got - want).frobenius_norm() < 1e-12);
        // and equals the closed-form cosh/sinh matrix
        let m = Mat2::new(1.0f64.cosh(), -1.0f64.sinh(), -1.0f64.sinh(), 1.0f64.cosh());
        assert!((got - m).frobenius_norm() < 1e-12);
    }

    #[test]
    fn single_slice_is_one_exponential() {
        let sys = ControlSystem::example(0.3);
        let pulse = Pulse::new(vec![0.7], 0.9);
        let got = propagate(&sys, &pulse).mat();
        let want = sys.generator(0.7).expm(0.9).mat();
        assert!((got - want).frobenius_norm() < 1e-14);
    }

    #[test]
    fn constant_pulse_independent_of_slicing() {
        let sys = ControlSystem::example(0.0);
        let a = propagate(&sys, &Pulse::new(vec![1.0; 1], 0.5)).mat();
        let b = propagate(&sys, &Pulse::new(vec![1.0; 16], 0.5)).mat();
        assert!((a - b).frobenius_norm() < 1e-12);
        let want = sys.generator(1.0).expm(0.5).mat();
        assert!((a - want).frobenius_norm() < 1e-12);
    }

    #[test]
    fn fidelity_error_values() {
        let i = SymplecticMatrix::identity();
        assert_eq!(fidelity_error(&i, &i), 0.0);
        let minus =
            SymplecticMatrix::new(Mat2::new(-1.0, 0.0, 0.0, -1.0)).unwrap();
        assert!((fidelity_error(&i, &minus) - 1.0).abs() < 1e-15);
        let r = SymplecticMatrix::rotation(FRAC_PI_2);
        assert!((fidelity_error(&i, &r) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn frechet_derivative_matches_finite_difference() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let m = Mat2::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let e = Mat2::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let l = expm_frechet(&m, &e);
            let h = 1e-7;
            let fd = (mat2_expm_dense(&(m + e.scale(h))) - mat2_expm_dense(&(m - e.scale(h))))
                .scale(1.0 / (2.0 * h));
            assert!((l - fd).frobenius_norm() < 1e-6 * (1.0 + fd.frobenius_norm()));
        }
    }

    // independent dense exponential for the oracle above
    fn mat2_expm_dense(m: &Mat2<f64>) -> Mat2<f64> {
        let mut result = Mat2::identity();
        let mut term = Mat2::identity();
        for k in 1..40 {
            term = (term * *m).scale(1.0 / k as f64);
            result = result + term;
        }
        result
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for _ in 0..20 {
            let c = rng.gen_range(-0.9..0.9);
            let t = rng.gen_range(0.2..3.0);
            let sys = ControlSystem::example(c);
            let target = compose(&EulerTriple::new(-2.0, 2.0, 2.0));
            let mut problem = PulseProblem::new(sys, target, t);
            problem.slices = 10;
            let pulse = Pulse::new(
                (0..10).map(|_| rng.gen_range(-2.0..2.0)).collect(),
                t,
            );
            let g = gradient(&problem, &pulse);
            let h = 1e-6;
            for k in 0..10 {
                let mut up = pulse.clone();
                up.values[k] += h;
                let mut dn = pulse.clone();
                dn.values[k] -= h;
                let fd = (fidelity_error(&propagate(&problem.system, &up), &problem.target)
                    - fidelity_error(&propagate(&problem.system, &dn), &problem.target))
                    / (2.0 * h);
                assert!(
                    (g[k] - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                    "slice {k}: analytic {} vs fd {fd}",
                    g[k]
                );
            }
        }
    }

    #[test]
    fn drift_reachable_target_is_reached() {
        let sys = ControlSystem::example(0.0);
        let target = sys.drift.expm(1.0);
        let mut problem = PulseProblem::new(sys, target, 1.0);
        problem.seed = 42;
        let result = optimize(&problem);
        assert_eq!(result.status, OptimStatus::Reached);
        assert!(result.epsilon < 1e-3);
    }

    #[test]
    fn rotation_target_is_never_reached() {
        let sys = ControlSystem::example(0.0);
        let target = SymplecticMatrix::rotation(FRAC_PI_2);
        let mut problem = PulseProblem::new(sys, target, 1.0);
        problem.seed = 7;
        let result = optimize(&problem);
        assert_ne!(result.status, OptimStatus::Reached);
        assert!(result.epsilon >= 1e-3);
    }

    #[test]
    fn interior_svd_target_is_reached() {
        // the certificate grows at least like e^{2t} for c = 0, so the
        // target must sit above the z = e^T shell to be reachable at T
        let sys = ControlSystem::example(0.0);
        let target = compose(&EulerTriple::new(-0.75 * PI + 0.1, 4.0, 0.75 * PI - 0.1));
        let mut problem = PulseProblem::new(sys, target, 1.0);
        problem.seed = 1;
        let result = optimize(&problem);
        assert_eq!(result.status, OptimStatus::Reached, "eps={}", result.epsilon);
    }

    #[test]
    fn target_below_certificate_shell_is_not_reached() {
        // z = 3 < e^5: f(S(5)) >= e^{10} > z^2 makes this target impossible
        let sys = ControlSystem::example(0.0);
        let target = compose(&EulerTriple::new(-0.75 * PI + 0.2, 3.0, 0.75 * PI - 0.2));
        let mut problem = PulseProblem::new(sys, target, 5.0);
        problem.seed = 1;
        let result = optimize(&problem);
        assert_ne!(result.status, OptimStatus::Reached);
    }

    #[test]
    fn optimization_is_deterministic() {
        let sys = ControlSystem::example(0.5);
        let target = compose(&EulerTriple::new(-2.2, 2.0, 2.2));
        let mut problem = PulseProblem::new(sys, target, 2.0);
        problem.seed = 99;
        let a = optimize(&problem);
        let b = optimize(&problem);
        assert_eq!(a.epsilon.to_bits(), b.epsilon.to_bits());
        assert_eq!(a.pulse, b.pulse);
        assert_eq!(a.status, b.status);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn propagation_stays_symplectic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let sys = ControlSystem::example(rng.gen_range(-0.9..0.9));
            let pulse = Pulse::new(
                (0..10).map(|_| rng.gen_range(-5.0..5.0)).collect(),
                rng.gen_range(0.1..3.0),
            );
            let s = propagate(&sys, &pulse);
            assert!((s.mat().det() - 1.0).abs() < 1e-9);
        }
    }
}
