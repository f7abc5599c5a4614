//! Classical orbits on the sphere and the virial / correspondence checks.
//!
//! Orbits integrate directly in the spherical angles `(chi, theta)` with the
//! Lagrangian `R^2 (chi'^2 + sin^2 chi theta'^2)/2 - V(R tan chi)`; the
//! Appendix-style flat comparison integrates an independent plane system, so
//! agreement between the two is a genuine cross-check rather than a
//! reparametrization identity.

mod analysis;
mod integrate;

pub use analysis::{
    closure_report, flat_correspondence, orbit_equation_residual, virial_time_averages,
    ClosureReport, CorrespondenceReport, VirialAverages,
};
pub use integrate::{
    detect_radial_period, integrate_flat, integrate_sphere, FlatOrbit, OrbitState,
};

use crate::geometry::CurvedParams;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassicalError {
    #[error("orbit left the open hemisphere (|chi| reached {0:.4})")]
    LeftHemisphere(f64),
    #[error("orbit reached the potential singularity at r = 0")]
    HitSingularity,
    #[error("no orbital period detected within tmax = {tmax} (best guess {best_guess:?})")]
    PeriodNotFound { tmax: f64, best_guess: Option<f64> },
    #[error("orbit equation needs nonzero angular momentum (got {0:.3e})")]
    ZeroAngularMomentum(f64),
    #[error("radial correspondence needs a radial or rotating orbit")]
    UnsupportedOrbit,
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("curvature must be positive for a spherical orbit")]
    FlatCurvature,
}

/// Central potentials used by the classical checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// `V = -kappa / r`
    Coulomb { kappa: f64 },
    /// `V = omega2 r^2 / 2`
    Oscillator { omega2: f64 },
    /// `V = -kappa / r + epsilon r`; precesses, the Bertrand negative control
    PerturbedCoulomb { kappa: f64, epsilon: f64 },
}

impl Potential {
    pub fn v(&self, r: f64) -> f64 {
        match self {
            Potential::Coulomb { kappa } => -kappa / r,
            Potential::Oscillator { omega2 } => 0.5 * omega2 * r * r,
            Potential::PerturbedCoulomb { kappa, epsilon } => -kappa / r + epsilon * r,
        }
    }

    pub fn dv(&self, r: f64) -> f64 {
        match self {
            Potential::Coulomb { kappa } => kappa / (r * r),
            Potential::Oscillator { omega2 } => omega2 * r,
            Potential::PerturbedCoulomb { kappa, epsilon } => kappa / (r * r) + epsilon,
        }
    }

    /// singular at the origin?
    pub fn singular_origin(&self) -> bool {
        !matches!(self, Potential::Oscillator { .. })
    }
}

/// One recorded point of a spherical trajectory with its conserved
/// diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct OrbitSample {
    pub t: f64,
    pub chi: f64,
    pub theta: f64,
    pub chi_dot: f64,
    pub theta_dot: f64,
    pub energy: f64,
    pub angular_momentum: f64,
}

/// Time-stamped classical trajectory on the sphere plus dense interpolation
/// state for resampling.
#[derive(Debug, Clone)]
pub struct SphericalOrbit {
    pub samples: Vec<OrbitSample>,
    pub params: CurvedParams,
    pub potential: Potential,
    pub(crate) dense: integrate::DenseOutput,
}

impl SphericalOrbit {
    pub fn radius(&self) -> f64 {
        self.params.radius().expect("spherical orbit has lambda > 0")
    }

    /// projected radius `r = R tan chi` at a sample
    pub fn projected_r(&self, s: &OrbitSample) -> f64 {
        self.radius() * s.chi.tan()
    }

    pub fn initial(&self) -> &OrbitSample {
        &self.samples[0]
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().unwrap().t
    }

    /// interpolated state at time `t`
    pub fn state_at(&self, t: f64) -> OrbitState {
        self.dense.sample(t)
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.samples[0].energy;
        self.samples
            .iter()
            .map(|s| (s.energy - e0).abs())
            .fold(0.0, f64::max)
            / e0.abs().max(1e-300)
    }

    pub fn max_angular_momentum_drift(&self) -> f64 {
        let l0 = self.samples[0].angular_momentum;
        let scale = l0.abs().max(1e-12);
        self.samples
            .iter()
            .map(|s| (s.angular_momentum - l0).abs())
            .fold(0.0, f64::max)
            / scale
    }
}
