//! Independent numerical verification: grid eigensolvers for the curved
//! Hamiltonians, expectation-value quadrature, and residual checkers for the
//! virial and hypervirial identities.
//!
//! Both Hamiltonians are conjugated to `-1/2 d^2/du^2 + V(x(u))` on the
//! arclength coordinate `u`, with `x(u) = tan(sqrt(lambda) u)/sqrt(lambda)`:
//! the similarity transform `phi = (1 + lambda x^2)^{1/2} psi` (line) or
//! `phi = (r (1 + lambda r^2))^{1/2} psi` (radial, measure `r dr`) turns the
//! curved momentum into exactly `-i d/du`, so a plain three-point Laplacian
//! discretizes the kinetic term. The radial chart continues through the
//! equator to the far pole (`u` up to `pi/sqrt(lambda)`), which keeps the
//! Coulomb problem free of artificial walls; the oscillator potentials
//! diverge at the equator and confine by themselves.

mod builders;
mod expectation;
mod tridiag;

pub use builders::{
    build_coulomb_radial, build_oscillator_1d, build_oscillator_radial, oscillator_radial_energy,
    RadialOscillatorSpec,
};
pub use expectation::{
    hypervirial_residual_quantum, moment_expectation, richardson, untransformed_rayleigh_1d,
    virial_residual_quantum,
};
pub use tridiag::{lowest_eigenpairs, matrix_inf_norm, residual_norm, sturm_count, TridiagError};

use crate::hvhf::{CoulombSpec, OscillatorSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid of {npoints} points cannot resolve level n={n} (need at least {need})")]
    GridTooCoarse { npoints: usize, n: u32, need: usize },
    #[error("full-sphere radial grid needs an even point count, got {0}")]
    OddRadialGrid(usize),
    #[error("requested {count} states exceeds npoints/4 = {limit}")]
    TooManyStates { count: usize, limit: usize },
    #[error("moment <{coordinate}^{k}>{weighted} is not integrable for this state")]
    MomentDiverges {
        k: i64,
        coordinate: &'static str,
        weighted: &'static str,
    },
    #[error("virial curvature term is not integrable for the unconfined Coulomb realization")]
    VirialDiverges,
    #[error("hypervirial relation at k={k} involves non-integrable moments for this system")]
    RelationDiverges { k: i64 },
    #[error(transparent)]
    Eigen(#[from] TridiagError),
}

/// Uniform interior grid on `(umin, umax)`: `h = span/(npoints+1)`, nodes at
/// `umin + i h`, Dirichlet values pinned at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub npoints: usize,
    pub umin: f64,
    pub umax: f64,
}

impl GridSpec {
    pub fn h(&self) -> f64 {
        (self.umax - self.umin) / (self.npoints as f64 + 1.0)
    }

    pub fn node(&self, i: usize) -> f64 {
        self.umin + self.h() * (i as f64 + 1.0)
    }
}

/// Which physical system a discrete Hamiltonian represents; carries what the
/// residual checkers need (potentials, derivatives, integrability limits).
#[derive(Debug, Clone, Copy)]
pub enum SystemKind {
    /// line system, weight `1 + lambda x^2`, measure `dx`
    Oscillator1d { spec: OscillatorSpec, beta: f64 },
    /// radial sector `m`, measure `r dr`, full-sphere chart
    CoulombRadial { spec: CoulombSpec, beta: f64 },
    /// radial sector `m` of the isotropic oscillator, hemisphere chart
    OscillatorRadial { spec: RadialOscillatorSpec },
}

impl SystemKind {
    pub fn lambda(&self) -> f64 {
        match self {
            SystemKind::Oscillator1d { spec, .. } => spec.params.lambda(),
            SystemKind::CoulombRadial { spec, .. } => spec.params.lambda(),
            SystemKind::OscillatorRadial { spec } => spec.params.lambda(),
        }
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self, SystemKind::Oscillator1d { .. })
    }

    /// angular number squared for radial sectors, 0 for the line
    pub fn m_squared(&self) -> f64 {
        match self {
            SystemKind::Oscillator1d { .. } => 0.0,
            SystemKind::CoulombRadial { spec, .. } => (spec.m * spec.m) as f64,
            SystemKind::OscillatorRadial { spec } => (spec.m * spec.m) as f64,
        }
    }

    /// Central potential V (the full one appearing in H, perturbation
    /// included; for radial systems this is V(r), not the effective V1).
    pub fn v_central(&self, x: f64) -> f64 {
        match self {
            SystemKind::Oscillator1d { spec, beta } => {
                let lam = spec.params.lambda();
                0.5 * spec.alpha * x * x
                    + beta * x.powi(spec.l as i32) * (1.0 + lam * x * x)
            }
            SystemKind::CoulombRadial { spec, beta } => {
                let lam = spec.params.lambda();
                -spec.kappa / x + beta * x.powi(spec.l as i32) * (1.0 + lam * x * x)
            }
            SystemKind::OscillatorRadial { spec } => 0.5 * spec.alpha * x * x,
        }
    }

    /// d/dx of [`Self::v_central`].
    pub fn dv_central(&self, x: f64) -> f64 {
        match self {
            SystemKind::Oscillator1d { spec, beta } => {
                let lam = spec.params.lambda();
                let l = spec.l as f64;
                spec.alpha * x
                    + beta
                        * (l * x.powi(spec.l as i32 - 1)
                            + (l + 2.0) * lam * x.powi(spec.l as i32 + 1))
            }
            SystemKind::CoulombRadial { spec, beta } => {
                let lam = spec.params.lambda();
                let l = spec.l as f64;
                spec.kappa / (x * x)
                    + beta
                        * (l * x.powi(spec.l as i32 - 1)
                            + (l + 2.0) * lam * x.powi(spec.l as i32 + 1))
            }
            SystemKind::OscillatorRadial { spec } => spec.alpha * x,
        }
    }

    /// Effective potential in the transformed radial problem
    /// `V1 = V - [(1/2 - m^2) lambda - (m^2 - 1/4)/r^2]/2`; for the line it is
    /// just V.
    pub fn v_effective(&self, x: f64) -> f64 {
        match self {
            SystemKind::Oscillator1d { .. } => self.v_central(x),
            _ => {
                let m2 = self.m_squared();
                let lam = self.lambda();
                self.v_central(x) - 0.5 * ((0.5 - m2) * lam - (m2 - 0.25) / (x * x))
            }
        }
    }

    /// d/dx of [`Self::v_effective`].
    pub fn dv_effective(&self, x: f64) -> f64 {
        match self {
            SystemKind::Oscillator1d { .. } => self.dv_central(x),
            _ => {
                let m2 = self.m_squared();
                self.dv_central(x) - (m2 - 0.25) / (x * x * x)
            }
        }
    }
}

/// Symmetric tridiagonal discretization of a transformed Hamiltonian, plus
/// everything needed to undo the transformation in quadratures.
#[derive(Debug, Clone)]
pub struct DiscreteHamiltonian {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub grid: GridSpec,
    pub system: SystemKind,
}

impl DiscreteHamiltonian {
    /// chart coordinate (x or r) at interior node `i`
    pub fn chart_x(&self, i: usize) -> f64 {
        builders::chart_coordinate(self.grid.node(i), self.system.lambda())
    }

    pub fn inf_norm(&self) -> f64 {
        matrix_inf_norm(&self.diag, &self.offdiag)
    }

    /// Lowest `count` eigenpairs; states normalized in L2(du).
    pub fn eigen_lowest(&self, count: usize) -> Result<Vec<EigenState>, OracleError> {
        let limit = self.grid.npoints / 4;
        if count > limit {
            return Err(OracleError::TooManyStates { count, limit });
        }
        let pairs = lowest_eigenpairs(&self.diag, &self.offdiag, count)?;
        let h = self.grid.h();
        Ok(pairs
            .into_iter()
            .enumerate()
            .map(|(index, (energy, mut phi))| {
                // l2-normalized -> L2(du)-normalized
                let inv = 1.0 / h.sqrt();
                for p in phi.iter_mut() {
                    *p *= inv;
                }
                EigenState { energy, phi, index }
            })
            .collect())
    }
}

/// Free-function form of [`DiscreteHamiltonian::eigen_lowest`].
pub fn eigen_lowest(
    h: &DiscreteHamiltonian,
    count: usize,
) -> Result<Vec<EigenState>, OracleError> {
    h.eigen_lowest(count)
}

/// One eigenstate of a transformed Hamiltonian: grid samples of `phi`,
/// normalized so `sum phi_i^2 h = 1`.
#[derive(Debug, Clone)]
pub struct EigenState {
    pub energy: f64,
    pub phi: Vec<f64>,
    pub index: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CurvedParams;

    #[test]
    fn grid_nodes_are_interior() {
        let g = GridSpec {
            npoints: 9,
            umin: 0.0,
            umax: 1.0,
        };
        assert!((g.h() - 0.1).abs() < 1e-15);
        assert!((g.node(0) - 0.1).abs() < 1e-15);
        assert!((g.node(8) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn effective_potential_carries_centrifugal_term() {
        let spec = CoulombSpec::new(1.0, 0, 2, -3, CurvedParams::new(0.1).unwrap()).unwrap();
        let sys = SystemKind::CoulombRadial { spec, beta: 0.0 };
        let r = 1.7;
        let expect = -1.0 / r - 0.5 * ((0.5 - 4.0) * 0.1 - (4.0 - 0.25) / (r * r));
        assert!((sys.v_effective(r) - expect).abs() < 1e-14);
    }
}
