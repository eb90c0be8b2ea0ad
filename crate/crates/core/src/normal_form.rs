//! Constructive reduction of an all-hyperbolic control system
//! dS/dt = (A + u B) S to the normal form dS/dt = (-K_x + b K_z + u K_y) S
//! with |b| < 1, via explicit symplectic conjugations, a control
//! redefinition, a time rescale and (when needed) conjugation by Omega.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    rank_criterion, AlgebraElement, BasisCoords, StabilityClass, SymplecticMatrix,
};
use crate::error::{Result, Sp2Error};
use crate::scalar::Real;

/// Drift/control generator pair of the bilinear system dS/dt = (A + u B) S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSystem<T> {
    pub drift: AlgebraElement<T>,
    pub control: AlgebraElement<T>,
}

impl<T: Real> ControlSystem<T> {
    pub fn new(drift: AlgebraElement<T>, control: AlgebraElement<T>) -> Self {
        Self { drift, control }
    }

    /// The example system A(c) = -2 K_x + 2c K_z, B = 2 K_y.
    pub fn example(c: T) -> Self {
        Self {
            drift: AlgebraElement::from_coords(BasisCoords::new(
                -T::two(),
                T::zero(),
                T::two() * c,
            )),
            control: AlgebraElement::from_coords(BasisCoords::new(T::zero(), T::two(), T::zero())),
        }
    }

    /// Generator A + u B at control value u.
    pub fn generator(&self, u: T) -> AlgebraElement<T> {
        self.drift.add(&self.control.scale(u))
    }
}

/// Bookkeeping of the reduction to -K_x + b K_z + u K_y.
///
/// With S~(tau) = P S(tau / time_scale) P^{-1} and the transformed pulse
/// v(tau) = (u_scale * u(tau / time_scale) + u_offset) / time_scale,
/// the conjugated trajectory obeys dS~/dtau = (-K_x + b K_z + v K_y) S~.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalForm<T> {
    pub b: T,
    pub p: SymplecticMatrix<T>,
    pub time_scale: T,
    pub u_offset: T,
    pub u_scale: T,
    pub time_reversed: bool,
}

impl<T: Real> NormalForm<T> {
    /// Maps an original-frame pulse value to the normal-form frame.
    pub fn map_control(&self, u: T) -> T {
        (self.u_scale * u + self.u_offset) / self.time_scale
    }

    /// Maps a normal-form pulse value back to the original frame.
    pub fn unmap_control(&self, v: T) -> T {
        (v * self.time_scale - self.u_offset) / self.u_scale
    }

    /// Rebuilds the original (A, B) pair from the stored bookkeeping.
    pub fn reconstruct(&self) -> ControlSystem<T> {
        let pinv = self.p.inverse();
        let drift_nf = AlgebraElement::from_coords(BasisCoords::new(
            -self.time_scale,
            self.u_offset,
            self.b * self.time_scale,
        ));
        let control_nf = AlgebraElement::from_coords(BasisCoords::new(
            T::zero(),
            self.u_scale,
            T::zero(),
        ));
        ControlSystem {
            drift: pinv.conjugate_algebra(&drift_nf),
            control: pinv.conjugate_algebra(&control_nf),
        }
    }
}

/// True iff every accessible generator A + v B is hyperbolic, i.e. the
/// quadratic Tr[(A + vB)^2] = Tr[B^2] v^2 + 2 Tr[AB] v + Tr[A^2] is
/// strictly positive for all real v.
pub fn is_unstable<T: Real>(sys: &ControlSystem<T>) -> bool {
    let ta = sys.drift.trace_sq();
    let tb = sys.control.trace_sq();
    let tab = sys.drift.trace_product(&sys.control);
    tb > T::zero() && ta > T::zero() && tab * tab < ta * tb
}

/// Conjugates a hyperbolic element onto the K_y axis:
/// P M P^{-1} = sqrt(2 Tr[M^2]) K_y with P = exp(beta K_x) exp(alpha K_z).
pub fn hyperbolic_to_ky<T: Real>(m: &AlgebraElement<T>) -> Result<(SymplecticMatrix<T>, T)> {
    if m.classify() != StabilityClass::Hyperbolic {
        return Err(Sp2Error::NotHyperbolic {
            trace_sq: m.trace_sq().to_f64().unwrap_or(f64::NAN),
        });
    }
    let c = m.to_basis_coords();
    let r2 = c.x * c.x + c.y * c.y;
    let h2 = r2 - c.z * c.z;
    let norm = m.mat().frobenius_norm();
    // beta diverges at the parabolic boundary
    if h2 <= T::zero() || h2.sqrt() < T::of(1e-9) * norm {
        return Err(Sp2Error::NotHyperbolic {
            trace_sq: m.trace_sq().to_f64().unwrap_or(f64::NAN),
        });
    }
    let h = h2.sqrt();
    let alpha = c.x.atan2(c.y);
    let beta = (c.z / h).asinh();
    let p = AlgebraElement::k_x()
        .expm(beta)
        .compose(&AlgebraElement::k_z().expm(alpha));
    Ok((p, h))
}

/// Reduces an unstable, rank-criterion-satisfying system to the normal form.
pub fn normalize<T: Real>(sys: &ControlSystem<T>) -> Result<NormalForm<T>> {
    if !is_unstable(sys) {
        return Err(Sp2Error::NotUnstable);
    }
    if !rank_criterion(&sys.drift, &sys.control) {
        return Err(Sp2Error::RankCriterion);
    }

    // (1) rotate the control onto the K_y axis
    let (p1, control_scale) = hyperbolic_to_ky(&sys.control)?;
    let drift1 = p1.conjugate_algebra(&sys.drift).to_basis_coords();

    // (4, decided early) if the K_x coefficient is positive, conjugate by
    // Omega, which negates the K_x and K_y basis components and fixes K_z
    let flip = drift1.x > T::zero();
    let (p, coords, sigma) = if flip {
        let omega = SymplecticMatrix::omega();
        (
            omega.compose(&p1),
            BasisCoords::new(-drift1.x, -drift1.y, drift1.z),
            -T::one(),
        )
    } else {
        (p1, drift1, T::one())
    };

    // (2) the drift's K_y component is absorbed into the redefined control;
    // (3) time is rescaled so the K_x coefficient has modulus one
    let time_scale = coords.x.abs();
    let b = coords.z / time_scale;
    debug_assert!(b.abs() < T::one());
    Ok(NormalForm {
        b,
        p,
        time_scale,
        u_offset: coords.y,
        u_scale: sigma * control_scale,
        time_reversed: flip,
    })
}
