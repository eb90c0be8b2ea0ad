//! The Lie algebra sp(2,R) and group Sp(2,R): basis coordinates,
//! stability classification, closed-form exponentials and the rank criterion.
//!
//! sp(2,R) is exactly the traceless real 2x2 matrices; Sp(2,R) is the
//! 2x2 matrices of unit determinant. All exponentials are evaluated in
//! closed form via Cayley-Hamilton, so no iterative linear algebra is
//! involved anywhere in this module.

use serde::{Deserialize, Serialize};

use crate::error::{Result, Sp2Error};
use crate::mat2::Mat2;
use crate::scalar::Real;

/// Absolute floor of the tracelessness check.
const TRACE_TOL: f64 = 1e-12;
/// Relative determinant tolerance for membership in Sp(2,R).
const DET_TOL: f64 = 1e-10;
/// Scale-aware threshold below which Tr[M^2] counts as parabolic.
const PARABOLIC_TOL: f64 = 1e-12;
/// Below |det M| t^2 of this size the sin/sinh ratio functions are
/// evaluated by series to avoid 0/0 at the parabolic boundary.
const EXPM_SERIES_THRESHOLD: f64 = 1e-8;

/// Stability class of an algebra element, decided by the sign of Tr[M^2].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityClass {
    Parabolic,
    Hyperbolic,
    Elliptic,
}

/// Coefficients of an algebra element over the basis (K_x, K_y, K_z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisCoords<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BasisCoords<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// An element of sp(2,R): a traceless real 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement<T> {
    mat: Mat2<T>,
}

impl<T: Real> AlgebraElement<T> {
    /// Wraps a matrix, rejecting it if the trace is not (numerically) zero.
    pub fn new(mat: Mat2<T>) -> Result<Self> {
        let tr = mat.trace();
        if tr.abs() > T::of(TRACE_TOL) * (T::one() + mat.frobenius_norm()) {
            return Err(Sp2Error::NonTraceless {
                trace: tr.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { mat })
    }

    /// Builds the element x K_x + y K_y + z K_z.
    pub fn from_coords(c: BasisCoords<T>) -> Self {
        let h = T::half();
        Self {
            mat: Mat2::new(-c.y * h, (c.x - c.z) * h, (c.x + c.z) * h, c.y * h),
        }
    }

    pub fn k_x() -> Self {
        Self::from_coords(BasisCoords::new(T::one(), T::zero(), T::zero()))
    }

    pub fn k_y() -> Self {
        Self::from_coords(BasisCoords::new(T::zero(), T::one(), T::zero()))
    }

    pub fn k_z() -> Self {
        Self::from_coords(BasisCoords::new(T::zero(), T::zero(), T::one()))
    }

    pub fn mat(&self) -> Mat2<T> {
        self.mat
    }

    /// Basis coordinates (x, y, z); the round trip with `from_coords` is exact.
    pub fn to_basis_coords(&self) -> BasisCoords<T> {
        BasisCoords {
            x: self.mat.m21 + self.mat.m12,
            y: self.mat.m22 + self.mat.m22,
            z: self.mat.m21 - self.mat.m12,
        }
    }

    /// Tr[M^2], the classification invariant; equals (x^2 + y^2 - z^2)/2.
    pub fn trace_sq(&self) -> T {
        let m = self.mat;
        // Tr[M^2] = m11^2 + m22^2 + 2 m12 m21
        m.m11 * m.m11 + m.m22 * m.m22 + T::two() * m.m12 * m.m21
    }

    /// Classifies by the sign of Tr[M^2], with a scale-aware parabolic band.
    pub fn classify(&self) -> StabilityClass {
        let tr2 = self.trace_sq();
        let n = self.mat.frobenius_norm();
        let tol = T::of(PARABOLIC_TOL) * (T::one() + n * n);
        if tr2.abs() <= tol {
            StabilityClass::Parabolic
        } else if tr2 > T::zero() {
            StabilityClass::Hyperbolic
        } else {
            StabilityClass::Elliptic
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            mat: self.mat.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: self.mat + other.mat,
        }
    }

    pub fn neg(&self) -> Self {
        Self { mat: -self.mat }
    }

    /// Commutator MN - NM, again traceless.
    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            mat: self.mat * other.mat - other.mat * self.mat,
        }
    }

    /// Tr[MN].
    pub fn trace_product(&self, other: &Self) -> T {
        let a = self.mat;
        let b = other.mat;
        a.m11 * b.m11 + a.m12 * b.m21 + a.m21 * b.m12 + a.m22 * b.m22
    }

    /// Residual of the trace identity
    /// Tr[[M,N]^2] = 2 Tr[MN]^2 - 2 Tr[M^2] Tr[N^2].
    ///
    /// Identically zero on sp(2,R); kept as a numeric oracle.
    pub fn trace_identity_residual(&self, other: &Self) -> T {
        let lhs = self.commutator(other).trace_sq();
        let tmn = self.trace_product(other);
        let rhs = T::two() * (tmn * tmn - self.trace_sq() * other.trace_sq());
        lhs - rhs
    }

    /// Closed-form exponential exp(M t) via Cayley-Hamilton.
    ///
    /// For traceless M, exp(M t) = c I + s M where (c, s) are the
    /// cos/cosh pair of mu = -det(M) t^2; the series branch covers the
    /// parabolic boundary where dividing by the frequency would cancel.
    pub fn expm(&self, t: T) -> SymplecticMatrix<T> {
        let d = self.mat.det();
        let mu = -d * t * t; // > 0 hyperbolic, < 0 elliptic, 0 parabolic
        let (c, s) = if mu.abs() < T::of(EXPM_SERIES_THRESHOLD) {
            ratio_series(mu, t)
        } else if mu > T::zero() {
            let k = mu.sqrt(); // = kappa * t
            (k.cosh(), t * k.sinh() / k)
        } else {
            let w = (-mu).sqrt(); // = omega * t
            (w.cos(), t * w.sin() / w)
        };
        let m = self.mat;
        SymplecticMatrix {
            mat: Mat2::new(c + s * m.m11, s * m.m12, s * m.m21, c + s * m.m22),
        }
    }
}

/// Taylor series of (cosh sqrt(mu), t sinh(sqrt(mu))/sqrt(mu)) in mu,
/// valid for either sign. Eight terms is far below f64 round-off at
/// |mu| < 1e-8.
fn ratio_series<T: Real>(mu: T, t: T) -> (T, T) {
    let mut c = T::one();
    let mut s = T::one();
    let mut term_c = T::one();
    let mut term_s = T::one();
    let mut k = T::one();
    for _ in 0..8 {
        let two_k = T::two() * k;
        term_c = term_c * mu / (two_k * (two_k - T::one()));
        term_s = term_s * mu / (two_k * (two_k + T::one()));
        c = c + term_c;
        s = s + term_s;
        k = k + T::one();
    }
    (c, s * t)
}

/// True iff {A, B, [A,B]} span sp(2,R) as a 3-dimensional space.
pub fn rank_criterion<T: Real>(a: &AlgebraElement<T>, b: &AlgebraElement<T>) -> bool {
    let ca = a.to_basis_coords();
    let cb = b.to_basis_coords();
    let cc = a.commutator(b).to_basis_coords();
    let det = ca.x * (cb.y * cc.z - cb.z * cc.y) - cb.x * (ca.y * cc.z - ca.z * cc.y)
        + cc.x * (ca.y * cb.z - ca.z * cb.y);
    let scale = ca.norm() * cb.norm() * cc.norm();
    det.abs() > T::of(1e-10) * (T::one() + scale)
}

/// An element of Sp(2,R): a real 2x2 matrix with unit determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticMatrix<T> {
    mat: Mat2<T>,
}

impl<T: Real> SymplecticMatrix<T> {
    pub fn new(mat: Mat2<T>) -> Result<Self> {
        let det = mat.det();
        if (det - T::one()).abs() > T::of(DET_TOL) * det.abs().max(T::one()) {
            return Err(Sp2Error::NotSymplectic {
                det: det.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { mat })
    }

    /// Wraps without the determinant check, for products of already
    /// verified group elements.
    pub fn from_mat_unchecked(mat: Mat2<T>) -> Self {
        Self { mat }
    }

    pub fn identity() -> Self {
        Self {
            mat: Mat2::identity(),
        }
    }

    pub fn rotation(angle: T) -> Self {
        Self {
            mat: Mat2::rotation(angle),
        }
    }

    pub fn omega() -> Self {
        Self { mat: Mat2::omega() }
    }

    pub fn mat(&self) -> Mat2<T> {
        self.mat
    }

    pub fn inverse(&self) -> Self {
        // symplectic inverse is exact: swap diagonal, negate off-diagonal
        let m = self.mat;
        Self {
            mat: Mat2::new(m.m22, -m.m12, -m.m21, m.m11),
        }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            mat: self.mat * rhs.mat,
        }
    }

    /// Adjoint action P M P^{-1} on the algebra.
    pub fn conjugate_algebra(&self, m: &AlgebraElement<T>) -> AlgebraElement<T> {
        AlgebraElement {
            mat: self.mat * m.mat * self.inverse().mat,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Alg = AlgebraElement<f64>;

    fn coords(x: f64, y: f64, z: f64) -> Alg {
        Alg::from_coords(BasisCoords::new(x, y, z))
    }

    #[test]
    fn basis_matrices_match_definition() {
        assert_eq!(Alg::k_x().mat(), Mat2::new(0.0, 0.5, 0.5, 0.0));
        assert_eq!(Alg::k_y().mat(), Mat2::new(-0.5, 0.0, 0.0, 0.5));
        assert_eq!(Alg::k_z().mat(), Mat2::new(0.0, -0.5, 0.5, 0.0));
    }

    #[test]
    fn coords_round_trip() {
        let c = BasisCoords::new(1.25, -0.5, 3.0);
        let back = Alg::from_coords(c).to_basis_coords();
        assert_eq!(back, c);
    }

    #[test]
    fn kz_has_unit_z_coordinate() {
        let c = Alg::k_z().to_basis_coords();
        assert_eq!((c.x, c.y, c.z), (0.0, 0.0, 1.0));
    }

    #[test]
    fn example_system_coords() {
        // B = diag(-1, 1) = 2 K_y
        let b = Alg::new(Mat2::new(-1.0, 0.0, 0.0, 1.0)).unwrap();
        let cb = b.to_basis_coords();
        assert_eq!((cb.x, cb.y, cb.z), (0.0, 2.0, 0.0));
        // A(c) = [[0, -(1+c)], [-(1-c), 0]] = -2 K_x + 2c K_z
        let c = 0.7;
        let a = Alg::new(Mat2::new(0.0, -(1.0 + c), -(1.0 - c), 0.0)).unwrap();
        let ca = a.to_basis_coords();
        assert!((ca.x + 2.0).abs() < 1e-15);
        assert!(ca.y.abs() < 1e-15);
        assert!((ca.z - 2.0 * c).abs() < 1e-15);
    }

    #[test]
    fn non_traceless_rejected() {
        assert!(Alg::new(Mat2::new(1.0, 0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn classify_basis_and_mixtures() {
        assert_eq!(Alg::k_z().classify(), StabilityClass::Elliptic);
        assert!((Alg::k_z().trace_sq() + 0.5).abs() < 1e-15);
        // a K_y + K_z: elliptic |a|<1, parabolic |a|=1, hyperbolic |a|>1
        assert_eq!(coords(0.0, 2.0, 1.0).classify(), StabilityClass::Hyperbolic);
        assert_eq!(coords(0.0, 1.0, 1.0).classify(), StabilityClass::Parabolic);
        assert_eq!(coords(0.0, 0.5, 1.0).classify(), StabilityClass::Elliptic);
    }

    #[test]
    fn classify_example_drift() {
        let a = coords(-2.0, 0.0, 0.0);
        assert_eq!(a.classify(), StabilityClass::Hyperbolic);
        assert!((a.trace_sq() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn expm_at_zero_is_identity() {
        let m = coords(0.3, -1.1, 0.8);
        let s = m.expm(0.0);
        assert_eq!(s.mat(), Mat2::identity());
    }

    #[test]
    fn expm_hyperbolic_closed_form() {
        // M = [[0,-1],[-1,0]] squares to I, so exp(M) = cosh(1) I + sinh(1) M
        let m = Alg::new(Mat2::new(0.0, -1.0, -1.0, 0.0)).unwrap();
        let s = m.expm(1.0).mat();
        assert!((s.m11 - 1.0f64.cosh()).abs() < 1e-14);
        assert!((s.m12 + 1.0f64.sinh()).abs() < 1e-14);
        assert!((s.m21 + 1.0f64.sinh()).abs() < 1e-14);
        assert!((s.m22 - 1.0f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn expm_kz_quarter_turn() {
        // det K_z = 1/4, omega = 1/2, so exp(K_z pi) = R_{pi/2}
        let s = Alg::k_z().expm(std::f64::consts::PI).mat();
        let r = Mat2::rotation(std::f64::consts::FRAC_PI_2);
        assert!((s - r).frobenius_norm() < 1e-14);
    }

    #[test]
    fn structure_constants() {
        let kx = Alg::k_x();
        let ky = Alg::k_y();
        let kz = Alg::k_z();
        assert_eq!(kx.commutator(&ky).mat(), kz.neg().mat());
        assert_eq!(ky.commutator(&kz).mat(), kx.mat());
        assert_eq!(kz.commutator(&kx).mat(), ky.mat());
        assert_eq!(kx.commutator(&kx).mat(), Mat2::zero());
    }

    #[test]
    fn trace_identity_on_basis() {
        let kx = Alg::k_x();
        let ky = Alg::k_y();
        let kz = Alg::k_z();
        assert!(kx.trace_identity_residual(&ky).abs() < 1e-15);
        assert!(kz.trace_identity_residual(&kz).abs() < 1e-15);
    }

    #[test]
    fn rank_criterion_cases() {
        assert!(rank_criterion(&Alg::k_x(), &Alg::k_y()));
        assert!(!rank_criterion(&Alg::k_x(), &Alg::k_x().scale(2.0)));
        // example system at c = 0
        let a = coords(-2.0, 0.0, 0.0);
        let b = coords(0.0, 2.0, 0.0);
        assert!(rank_criterion(&a, &b));
    }

    #[test]
    fn symplectic_det_check() {
        assert!(SymplecticMatrix::new(Mat2::new(2.0, 0.0, 0.0, 0.5)).is_ok());
        assert!(SymplecticMatrix::new(Mat2::new(2.0, 0.0, 0.0, 2.0)).is_err());
    }

    #[test]
    fn expm_series_branch_matches_direct() {
        // just above and below the series threshold the two paths agree
        let m = coords(1.0, 0.0, 1.0 - 1e-5); // near-parabolic
        for &t in &[1e-3, 1e-2, 0.1, 1.0] {
            let s = m.expm(t).mat();
            assert!((s.det() - 1.0).abs() < 1e-12, "t={t}");
        }
    }
}
