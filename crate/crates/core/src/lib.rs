//! Analytic and numerical machinery for single-mode symplectic control
//! under unstable (all-hyperbolic) quadratic generators.
//!
//! The crate covers:
//! - exact 2x2 arithmetic on sp(2,R) and Sp(2,R) ([`algebra`], [`mat2`]);
//! - the unique Euler / singular value decomposition S = R_theta Z R_phi
//!   ([`euler`]);
//! - the reachability certificate f and its SVD form f_z ([`certificate`]);
//! - constructive reduction to the normal form -K_x + b K_z + u K_y
//!   ([`normal_form`]);
//! - piecewise-constant pulse optimization with exact Frechet-derivative
//!   gradients ([`pulse`]);
//! - grid sweeps over (z, theta, phi) targets, bisection boundary search,
//!   export and SVG scatter plots ([`grid`], [`export`], [`plot`]).
//!
//! The closed-form math modules are generic over the scalar type; the
//! optimizer and explorer work in `f64`.

pub mod algebra;
pub mod certificate;
pub mod error;
pub mod euler;
pub mod export;
pub mod grid;
pub mod mat2;
pub mod normal_form;
pub mod plot;
pub mod pulse;
pub mod scalar;
pub mod verify;

pub use error::{Result, Sp2Error};

/// Concrete `f64` aliases for the generic core types.
pub type Mat2d = mat2::Mat2<f64>;
pub type Algebra = algebra::AlgebraElement<f64>;
pub type Coords = algebra::BasisCoords<f64>;
pub type Symplectic = algebra::SymplecticMatrix<f64>;
pub type Euler = euler::EulerTriple<f64>;
pub type Offsets = euler::RangeOffsets<f64>;
pub type System = normal_form::ControlSystem<f64>;

/// Concrete `f32` aliases.
pub type Mat2f = mat2::Mat2<f32>;
pub type Algebra32 = algebra::AlgebraElement<f32>;
pub type Symplectic32 = algebra::SymplecticMatrix<f32>;
pub type Euler32 = euler::EulerTriple<f32>;
