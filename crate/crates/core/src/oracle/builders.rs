//! Hamiltonian builders on the arclength grid, with automatic domain
//! selection.
//!
//! The natural domains are `u in (-L, L)` for the line and `(0, 2L)` radial
//! (through the equator at `L = pi/(2 sqrt(lambda))`). Three situations force
//! a smaller box: a perturbation that dives to `-inf` somewhere (clip at the
//! barrier crest), a confining wall so steep the outer region is numerically
//! dead (clip once the WKB action into the forbidden region is huge), and the
//! near-flat limit where the natural span dwarfs the bound states. All three
//! reduce to one rule: walk outward from the potential well, accumulate the
//! decay action `S = integral sqrt(2 max(0, V - E_ref)) du`, and cut at a
//! crest passed with `S > 3` or anywhere once `S > 30`. Eigenvalue shifts
//! from the cut are of order `exp(-2S)` and invisible at working precision.

use super::{DiscreteHamiltonian, GridSpec, OracleError, SystemKind};
use crate::geometry::CurvedParams;
use crate::hvhf::{CoulombSpec, OscillatorSpec};

/// chart coordinate x(u) = tan(sqrt(lambda) u)/sqrt(lambda); identity at
/// lambda = 0
pub(super) fn chart_coordinate(u: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        u
    } else {
        let sl = lambda.sqrt();
        (sl * u).tan() / sl
    }
}

/// 2D oscillator restricted to angular sector `m`; the closed-form spectrum
/// `E = (M/2)(sqrt(lambda^2 + 4 alpha) + lambda M)`, `M = 2n + |m| + 1`,
/// is exposed by [`oscillator_radial_energy`].
#[derive(Debug, Clone, Copy)]
pub struct RadialOscillatorSpec {
    pub alpha: f64,
    pub n: u32,
    pub m: i64,
    pub params: CurvedParams,
}

/// `E_{n,m} = (M/2)(sqrt(lambda^2 + 4 alpha) + lambda M)`, `M = 2n + |m| + 1`.
pub fn oscillator_radial_energy(spec: &RadialOscillatorSpec) -> f64 {
    let lam = spec.params.lambda();
    let m_big = 2.0 * spec.n as f64 + spec.m.abs() as f64 + 1.0;
    0.5 * m_big * ((lam * lam + 4.0 * spec.alpha).sqrt() + lam * m_big)
}

struct DomainScan {
    e_ref: f64,
    crest_action: f64,
    cap_action: f64,
}

impl DomainScan {
    fn new(e_ref: f64) -> Self {
        Self {
            e_ref,
            crest_action: 3.0,
            cap_action: 30.0,
        }
    }

    /// Walk from `from` towards `to` (exclusive), return the clipped endpoint.
    fn clip(&self, from: f64, to: f64, v: impl Fn(f64) -> f64) -> f64 {
        let steps = 200_000;
        let du = (to - from) / steps as f64;
        let mut action = 0.0;
        let mut crest_u = to;
        let mut crest_v = f64::NEG_INFINITY;
        for i in 1..steps {
            let u = from + du * i as f64;
            let val = v(u);
            let gap = (val - self.e_ref).max(0.0);
            action += (2.0 * gap).sqrt() * du.abs();
            if val >= crest_v {
                crest_v = val;
                crest_u = u;
            } else if action > self.crest_action && val < crest_v - 0.1 * (crest_v - self.e_ref).abs()
            {
                return crest_u;
            }
            if action > self.cap_action {
                return u;
            }
        }
        to
    }
}

fn rough_level_bound(spec: &OscillatorSpec) -> f64 {
    let lam = spec.params.lambda();
    let n = spec.n as f64 + 2.0;
    let w = (lam * lam + 4.0 * spec.alpha).sqrt();
    (n + 0.5) * (lam + w) / 2.0 + n * n * lam / 2.0 + 1.0
}

fn check_resolution(npoints: usize, n: u32) -> Result<(), OracleError> {
    let need = 32 * (n as usize + 1);
    if npoints < need {
        return Err(OracleError::GridTooCoarse { npoints, n, need });
    }
    Ok(())
}

fn assemble(grid: GridSpec, system: SystemKind, v_eff: impl Fn(f64) -> f64) -> DiscreteHamiltonian {
    let h = grid.h();
    let kin = 1.0 / (h * h);
    let diag: Vec<f64> = (0..grid.npoints)
        .map(|i| kin + v_eff(grid.node(i)))
        .collect();
    let offdiag = vec![-0.5 * kin; grid.npoints - 1];
    DiscreteHamiltonian {
        diag,
        offdiag,
        grid,
        system,
    }
}

/// Transformed 1D oscillator `-1/2 d^2/du^2 + V(x(u))` with Dirichlet walls.
/// Handles every `lambda >= 0`: the curved chart ends at the equator, the
/// flat limit gets a box sized by the decay action.
pub fn build_oscillator_1d(
    spec: &OscillatorSpec,
    beta: f64,
    npoints: usize,
) -> Result<DiscreteHamiltonian, OracleError> {
    check_resolution(npoints, spec.n)?;
    let lam = spec.params.lambda();
    let system = SystemKind::Oscillator1d { spec: *spec, beta };
    let v = |u: f64| system.v_effective(chart_coordinate(u, lam));
    // natural half-span; a wide box stands in for the infinite flat line
    let l_nat = if lam > 0.0 {
        std::f64::consts::FRAC_PI_2 / lam.sqrt() * (1.0 - 1e-12)
    } else {
        1e4 * (1.0 + 1.0 / spec.alpha.powf(0.25))
    };
    let scan = DomainScan::new(rough_level_bound(spec));
    let umax = scan.clip(0.0, l_nat, v);
    let umin = scan.clip(0.0, -l_nat, v);
    let grid = GridSpec {
        npoints,
        umin,
        umax,
    };
    Ok(assemble(grid, system, v))
}

fn radial_span(lambda: f64, full_sphere: bool) -> f64 {
    if lambda > 0.0 {
        let l = std::f64::consts::FRAC_PI_2 / lambda.sqrt();
        if full_sphere {
            2.0 * l
        } else {
            l * (1.0 - 1e-12)
        }
    } else {
        f64::INFINITY
    }
}

/// Transformed radial Coulomb Hamiltonian `H1` on the full sphere: the chart
/// continues through the equator (where every potential term is smooth) to
/// the far pole, so no boundary condition is imposed at the equator at all.
/// `npoints` must be even so no node lands on the equator.
pub fn build_coulomb_radial(
    spec: &CoulombSpec,
    beta: f64,
    npoints: usize,
) -> Result<DiscreteHamiltonian, OracleError> {
    check_resolution(npoints, spec.n)?;
    if npoints % 2 != 0 {
        return Err(OracleError::OddRadialGrid(npoints));
    }
    let lam = spec.params.lambda();
    let system = SystemKind::CoulombRadial { spec: *spec, beta };
    let v = move |u: f64| transformed_radial_potential(&system, u);

    let span = radial_span(lam, true);
    let (umin, umax);
    if lam > 0.0 {
        // well sits around the near-pole minimum of V1
        let mut best = (f64::INFINITY, span * 0.25);
        for i in 1..2000 {
            let u = span * i as f64 / 2000.0;
            let val = v(u);
            if val < best.0 {
                best = (val, u);
            }
        }
        let e_ref = spec_level_bound(spec);
        let scan = DomainScan::new(e_ref);
        umax = scan.clip(best.1, span * (1.0 - 1e-12), v);
        umin = scan.clip(best.1, span * 1e-12, v);
    } else {
        // flat limit: half-line with an action-sized box
        let e_ref = spec_level_bound(spec);
        let scan = DomainScan::new(e_ref);
        umin = 0.0;
        umax = scan.clip(1.0, 1e5, v);
    }
    let grid = GridSpec {
        npoints,
        umin,
        umax,
    };
    Ok(assemble(grid, system, v))
}

fn spec_level_bound(spec: &CoulombSpec) -> f64 {
    let lam = spec.params.lambda();
    let s = spec.m.abs() as f64;
    let n = spec.n as f64 + 2.0;
    let nn = n + s + 0.5;
    -spec.kappa * spec.kappa / (2.0 * nn * nn) + lam / 2.0 * (n + s) * (n + s + 1.0) + 1.0
}

/// Transformed radial oscillator sector on the hemisphere (the `tan^2` wall
/// confines it there).
pub fn build_oscillator_radial(
    spec: &RadialOscillatorSpec,
    npoints: usize,
) -> Result<DiscreteHamiltonian, OracleError> {
    check_resolution(npoints, spec.n)?;
    let lam = spec.params.lambda();
    let system = SystemKind::OscillatorRadial { spec: *spec };
    let v = move |u: f64| transformed_radial_potential(&system, u);
    let e_ref = oscillator_radial_energy(&RadialOscillatorSpec {
        n: spec.n + 2,
        ..*spec
    }) + 1.0;
    let scan = DomainScan::new(e_ref);
    let (umin, umax);
    if lam > 0.0 {
        let span = radial_span(lam, false);
        let mid = 0.4 * span;
        umax = scan.clip(mid, span, v);
        umin = scan.clip(mid, span * 1e-12, v);
    } else {
        umin = 0.0;
        umax = scan.clip(1.0, 1e5, v);
    }
    let grid = GridSpec {
        npoints,
        umin,
        umax,
    };
    Ok(assemble(grid, system, v))
}

/// `V1(r(u))` evaluated through trigonometric forms that stay finite across
/// the equator: with `chi = sqrt(lambda) u`,
/// `1/r = sqrt(lambda) cot(chi)`, `1/r^2 = lambda cot^2(chi)`, and
/// `r^l (1 + lambda r^2) = lambda^{-l/2} sin^l(chi) cos^{-l-2}(chi)`.
fn transformed_radial_potential(system: &SystemKind, u: f64) -> f64 {
    let lam = system.lambda();
    let m2 = system.m_squared();
    if lam == 0.0 {
        return system.v_effective(u);
    }
    let sl = lam.sqrt();
    let (sin, cos) = (sl * u).sin_cos();
    let cot = cos / sin;
    let centrifugal = 0.5 * (m2 - 0.25) * lam * cot * cot;
    let constant = -0.5 * (0.5 - m2) * lam;
    match system {
        SystemKind::Oscillator1d { .. } => unreachable!("line system handled elsewhere"),
        SystemKind::CoulombRadial { spec, beta } => {
            let coulomb = -spec.kappa * sl * cot;
            let pert = if *beta == 0.0 {
                0.0
            } else {
                let l = spec.l as i32;
                beta * lam.powf(-(l as f64) / 2.0) * sin.powi(l) * cos.powi(-l - 2)
            };
            coulomb + pert + centrifugal + constant
        }
        SystemKind::OscillatorRadial { spec } => {
            let tan2 = sin * sin / (cos * cos);
            0.5 * spec.alpha * tan2 / lam + centrifugal + constant
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn osc(alpha: f64, n: u32, lambda: f64) -> OscillatorSpec {
        OscillatorSpec::new(alpha, n, 1, CurvedParams::new(lambda).unwrap()).unwrap()
    }

    #[test]
    fn builder_matrix_is_symmetric_by_construction() {
        let h = build_oscillator_1d(&osc(1.0, 0, 0.1), 0.0, 256).unwrap();
        assert_eq!(h.offdiag.len(), h.diag.len() - 1);
        // shared off-diagonal is the symmetry statement for a tridiagonal
        assert!(h.offdiag.iter().all(|&e| e == h.offdiag[0]));
    }

    #[test]
    fn oscillator_ground_state_matches_closed_form() {
        let spec = osc(1.0, 0, 0.1);
        let h = build_oscillator_1d(&spec, 0.0, 2048).unwrap();
        let states = h.eigen_lowest(1).unwrap();
        assert_relative_eq!(states[0].energy, 0.5256246098625197, epsilon = 2e-6);
    }

    #[test]
    fn oscillator_flat_proxy() {
        // lambda = 1e-6 behaves like the flat oscillator thanks to the
        // action-based box; and exactly flat lambda = 0 works the same way
        for lam in [1e-6, 0.0] {
            let spec = osc(1.0, 0, lam);
            let h = build_oscillator_1d(&spec, 0.0, 2048).unwrap();
            let e = h.eigen_lowest(1).unwrap()[0].energy;
            assert_relative_eq!(e, 0.5, epsilon = 1e-5);
        }
    }

    #[test]
    fn oscillator_ladder_flat() {
        let spec = osc(1.0, 2, 0.0);
        let h = build_oscillator_1d(&spec, 0.0, 2048).unwrap();
        let es = h.eigen_lowest(3).unwrap();
        for (n, s) in es.iter().enumerate() {
            assert_relative_eq!(s.energy, n as f64 + 0.5, epsilon = 1e-5);
        }
    }

    #[test]
    fn perturbed_domain_is_clipped() {
        // beta x (1 + lambda x^2) dives on the left; the box must end at the
        // barrier crest, not the equator
        let spec = osc(1.0, 0, 0.1);
        let free = build_oscillator_1d(&spec, 0.0, 512).unwrap();
        let pert = build_oscillator_1d(&spec, 0.2, 512).unwrap();
        assert!(pert.grid.umin > free.grid.umin + 0.1);
        // and the perturbed ground level stays near the free one
        let e0 = free.eigen_lowest(1).unwrap()[0].energy;
        let e1 = pert.eigen_lowest(1).unwrap()[0].energy;
        assert!((e0 - e1).abs() < 0.2);
    }

    #[test]
    fn coulomb_full_sphere_levels() {
        // full-sphere realization reproduces
        // -kappa^2/(2 N^2) + (lambda/2)(n+|m|)(n+|m|+1), N = n+|m|+1/2
        let params = CurvedParams::new(0.1).unwrap();
        let spec = CoulombSpec::new(1.0, 0, 1, -3, params).unwrap();
        let h = build_coulomb_radial(&spec, 0.0, 2048).unwrap();
        let h2 = build_coulomb_radial(&spec, 0.0, 4096).unwrap();
        let e1 = h.eigen_lowest(1).unwrap()[0].energy;
        let e2 = h2.eigen_lowest(1).unwrap()[0].energy;
        let e = super::super::richardson(e1, e2);
        assert_relative_eq!(e, -1.0 / (2.0 * 1.5f64.powi(2)) + 0.05 * 2.0, epsilon = 2e-6);
    }

    #[test]
    fn coulomb_flat_proxy() {
        let params = CurvedParams::new(1e-6).unwrap();
        let spec = CoulombSpec::new(1.0, 0, 1, -3, params).unwrap();
        let h = build_coulomb_radial(&spec, 0.0, 4096).unwrap();
        let e = h.eigen_lowest(1).unwrap()[0].energy;
        assert_relative_eq!(e, -2.0 / 9.0, epsilon = 1e-4);
    }

    #[test]
    fn radial_measure_identity() {
        // ((1 + lambda r^2) w)' = 2 (1/(2r) + (3/2) lambda r) w with w = r:
        // both sides are 1 + 3 lambda r^2. This is the Hermiticity condition
        // that pins the radial measure to r dr.
        let lam = 0.23;
        for r in [0.1, 0.7, 1.9, 14.0] {
            let lhs = 1.0 + 3.0 * lam * r * r; // d/dr[(1+lam r^2) r]
            let rhs = 2.0 * (0.5 / r + 1.5 * lam * r) * r;
            assert_relative_eq!(lhs, rhs, epsilon = 1e-14);
        }
    }

    #[test]
    fn grid_too_coarse_is_refused() {
        let spec = osc(1.0, 4, 0.1);
        assert!(matches!(
            build_oscillator_1d(&spec, 0.0, 100),
            Err(OracleError::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn odd_radial_grid_is_refused() {
        let params = CurvedParams::new(0.1).unwrap();
        let spec = CoulombSpec::new(1.0, 0, 1, -3, params).unwrap();
        assert!(matches!(
            build_coulomb_radial(&spec, 0.0, 513),
            Err(OracleError::OddRadialGrid(513))
        ));
    }

    #[test]
    fn radial_oscillator_closed_form() {
        let params = CurvedParams::new(0.1).unwrap();
        for (n, m) in [(0u32, 1i64), (0, 2), (1, 2)] {
            let spec = RadialOscillatorSpec {
                alpha: 1.0,
                n,
                m,
                params,
            };
            let h1 = build_oscillator_radial(&spec, 2048).unwrap();
            let h2 = build_oscillator_radial(&spec, 4096).unwrap();
            let e = super::super::richardson(
                h1.eigen_lowest(n as usize + 1).unwrap()[n as usize].energy,
                h2.eigen_lowest(n as usize + 1).unwrap()[n as usize].energy,
            );
            assert_relative_eq!(e, oscillator_radial_energy(&spec), epsilon = 5e-6);
        }
    }
}
