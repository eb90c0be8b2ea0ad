//! Grid-based reachable-set mapping in (z, theta, phi) space with
//! bisection refinement of the reachable/unreachable boundary.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, Sp2Error};
use crate::euler::{compose, EulerTriple, RangeOffsets};
use crate::normal_form::ControlSystem;
use crate::pulse::{optimize, OptimStatus, Pulse, PulseProblem};

/// Discretisation of the (z, theta, phi) target space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Step in both angular directions, radians.
    pub angular_step: f64,
    /// Number of logarithmically spaced z levels in [1, z_max].
    pub z_levels: usize,
    pub z_max: f64,
}

impl Default for GridSpec {
    /// The full-resolution grid: pi/12 angular steps, 10 log-spaced z
    /// levels up to z = 100.
    fn default() -> Self {
        Self {
            angular_step: std::f64::consts::PI / 12.0,
            z_levels: 10,
            z_max: 100.0,
        }
    }
}

impl GridSpec {
    /// The desk-scale grid used by the workstation acceptance runs.
    pub fn reduced() -> Self {
        Self {
            angular_step: std::f64::consts::PI / 6.0,
            z_levels: 5,
            z_max: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z_max > 1.0) || self.z_levels < 2 || !(self.angular_step > 0.0) {
            return Err(Sp2Error::Domain(
                "grid requires z_max > 1, z_levels >= 2, angular_step > 0".into(),
            ));
        }
        for (range, name) in [
            (2.0 * std::f64::consts::PI, "theta"),
            (std::f64::consts::PI, "phi"),
        ] {
            let cells = range / self.angular_step;
            if (cells - cells.round()).abs() > 1e-9 {
                return Err(Sp2Error::Domain(format!(
                    "angular step must divide the {name} range into whole cells"
                )));
            }
        }
        Ok(())
    }

    pub fn z_values(&self) -> Vec<f64> {
        let n = self.z_levels;
        (0..n)
            .map(|i| self.z_max.powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    fn angular_values(&self, lo: f64, width: f64) -> Vec<f64> {
        let n = (width / self.angular_step).round() as usize;
        (0..n).map(|i| lo + i as f64 * self.angular_step).collect()
    }

    /// All grid targets. On the degenerate z = 1 plane only (theta, 1, phi0)
    /// points are emitted, matching the convention that pins phi there.
    pub fn points(&self, offsets: &RangeOffsets<f64>) -> Vec<EulerTriple<f64>> {
        let thetas = self.angular_values(-std::f64::consts::PI + offsets.theta0, 2.0 * std::f64::consts::PI);
        let phis = self.angular_values(
            -std::f64::consts::FRAC_PI_2 + offsets.phi0,
            std::f64::consts::PI,
        );
        let mut out = Vec::new();
        for z in self.z_values() {
            if z - 1.0 <= 1e-12 {
                for &theta in &thetas {
                    out.push(EulerTriple::new(theta, 1.0, offsets.phi0));
                }
            } else {
                for &theta in &thetas {
                    for &phi in &phis {
                        out.push(EulerTriple::new(theta, z, phi));
                    }
                }
            }
        }
        out
    }
}

/// Shared optimizer settings for every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemDefaults {
    #[serde(rename = "Q")]
    pub slices: usize,
    pub u_max: f64,
    pub tol: f64,
    pub restarts: usize,
    pub wall_limit: f64,
}

impl Default for ProblemDefaults {
    fn default() -> Self {
        Self {
            slices: 10,
            u_max: 20.0,
            tol: 1e-3,
            restarts: 5,
            wall_limit: 10.0,
        }
    }
}

impl ProblemDefaults {
    pub fn problem(
        &self,
        c: f64,
        t: f64,
        target: crate::algebra::SymplecticMatrix<f64>,
        seed: u64,
    ) -> PulseProblem {
        let mut p = PulseProblem::new(ControlSystem::example(c), target, t);
        p.slices = self.slices;
        p.u_bounds = (-self.u_max, self.u_max);
        p.tol = self.tol;
        p.restarts = self.restarts;
        p.wall_limit = self.wall_limit;
        p.seed = seed;
        p
    }
}

/// Full sweep specification over (c, T) combinations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(rename = "c")]
    pub c_values: Vec<f64>,
    #[serde(rename = "T")]
    pub t_values: Vec<f64>,
    #[serde(default = "GridSpec::default")]
    pub grid: GridSpec,
    #[serde(default)]
    pub problem: ProblemDefaults,
    #[serde(default)]
    pub theta0: f64,
    #[serde(default = "default_phi0")]
    pub phi0: f64,
    #[serde(default)]
    pub seed: u64,
    /// Worker count; 0 means rayon's default.
    #[serde(default)]
    pub jobs: usize,
}

fn default_phi0() -> f64 {
    std::f64::consts::FRAC_PI_2
}

impl SweepSpec {
    pub fn offsets(&self) -> RangeOffsets<f64> {
        RangeOffsets {
            theta0: self.theta0,
            phi0: self.phi0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_values.is_empty() || self.t_values.is_empty() {
            return Err(Sp2Error::Domain("c and T lists must be non-empty".into()));
        }
        self.grid.validate()
    }
}

/// Outcome of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachRecord {
    pub c: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub theta: f64,
    pub z: f64,
    pub phi: f64,
    pub status: OptimStatus,
    pub epsilon: f64,
    pub seed: u64,
    pub wall_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulse: Option<Pulse>,
}

impl ReachRecord {
    pub fn reached(&self) -> bool {
        self.status == OptimStatus::Reached
    }
}

/// Per-point seed derived from the sweep seed and the point's grid index,
/// so results do not depend on the worker count.
pub fn point_seed(global_seed: u64, index: usize) -> u64 {
    global_seed
        .wrapping_mul(0x2545f4914f6cdd1d)
        .wrapping_add((index as u64).wrapping_mul(0x9e3779b97f4a7c15))
}

/// Runs the optimizer at every (c, T, grid point); one record per point,
/// in grid order.
pub fn run_grid(sweep: &SweepSpec) -> Result<Vec<ReachRecord>> {
    sweep.validate()?;
    let points = sweep.grid.points(&sweep.offsets());
    let mut tasks = Vec::new();
    for &c in &sweep.c_values {
        for &t in &sweep.t_values {
            for point in &points {
                tasks.push((c, t, *point));
            }
        }
    }

    let work = |(index, &(c, t, point)): (usize, &(f64, f64, EulerTriple<f64>))| {
        let seed = point_seed(sweep.seed, index);
        let target = compose(&point);
        let problem = sweep.problem.problem(c, t, target, seed);
        let clock = Instant::now();
        let result = optimize(&problem);
        ReachRecord {
            c,
            t,
            theta: point.theta,
            z: point.zed,
            phi: point.phi,
            status: result.status,
            epsilon: result.epsilon,
            seed,
            wall_time: clock.elapsed().as_secs_f64(),
            pulse: None,
        }
    };

    let records = if sweep.jobs == 1 {
        tasks.iter().enumerate().map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(sweep.jobs)
            .build()
            .map_err(|e| Sp2Error::Domain(format!("thread pool: {e}")))?;
        pool.install(|| tasks.par_iter().enumerate().map(work).collect::<Vec<_>>())
    };
    Ok(records)
}

/// Coordinate refined by a boundary search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Theta,
    Z,
    Phi,
}

/// Result of a bisection run along one coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub axis: Axis,
    /// The probe triple with the axis coordinate at the refined midpoint.
    pub point: EulerTriple<f64>,
    pub low: f64,
    pub high: f64,
    pub midpoint: f64,
    pub width: f64,
    pub low_reached: bool,
    pub probes: usize,
}

/// Interval-width tolerances on exit: absolute for angles, relative for z.
pub const BOUNDARY_ANGULAR_TOL: f64 = 1e-2;
pub const BOUNDARY_Z_REL_TOL: f64 = 1e-2;

fn with_axis(base: &EulerTriple<f64>, axis: Axis, v: f64) -> EulerTriple<f64> {
    let mut e = *base;
    match axis {
        Axis::Theta => e.theta = v,
        Axis::Z => e.zed = v,
        Axis::Phi => e.phi = v,
    }
    e
}

/// Bisects the reach status along `axis`, holding the other two
/// coordinates of `fixed` constant.
pub fn bisect_boundary(
    c: f64,
    t: f64,
    fixed: &EulerTriple<f64>,
    axis: Axis,
    bracket: (f64, f64),
    defaults: &ProblemDefaults,
    seed: u64,
) -> Result<BoundaryPoint> {
    let mut probes = 0;
    let mut probe = |v: f64| -> bool {
        let point = with_axis(fixed, axis, v);
        let target = compose(&point);
        let problem = defaults.problem(c, t, target, point_seed(seed, probes));
        probes += 1;
        optimize(&problem).status == OptimStatus::Reached
    };

    let (mut lo, mut hi) = bracket;
    let lo_reached = probe(lo);
    let hi_reached = probe(hi);
    if lo_reached == hi_reached {
        return Err(Sp2Error::NoBracket);
    }

    let done = |lo: f64, hi: f64| match axis {
        Axis::Z => hi - lo <= BOUNDARY_Z_REL_TOL * 0.5 * (lo + hi),
        _ => hi - lo <= BOUNDARY_ANGULAR_TOL,
    };
    while !done(lo, hi) {
        let mid = 0.5 * (lo + hi);
        if probe(mid) == lo_reached {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let midpoint = 0.5 * (lo + hi);
    Ok(BoundaryPoint {
        axis,
        point: with_axis(fixed, axis, midpoint),
        low: lo,
        high: hi,
        midpoint,
        width: hi - lo,
        low_reached: lo_reached,
        probes,
    })
}
