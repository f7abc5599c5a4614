//! Expectation values and identity residuals from grid eigenstates.
//!
//! All quadratures run in the transformed coordinate: `|psi|^2 dx` (line) and
//! `|psi|^2 r dr` (radial) both equal `|phi|^2 du`, so a moment is just a
//! weighted trapezoid sum of `phi_i^2` against powers of the chart
//! coordinate. The endpoints are included by quadratic extrapolation; that
//! matters for radial moments whose integrand stays finite at the origin,
//! where a bare interior sum would lose an O(h) slab.
//!
//! The kinetic pieces of the identities never get differenced: on an
//! eigenstate `pi^2 = 2(H - V)` (line) and `pi_r^2 = 2(H1 - V1)` (radial),
//! which turns every `pi^2` expectation into another potential quadrature.

use super::{DiscreteHamiltonian, EigenState, OracleError, SystemKind};

/// Richardson extrapolation over a grid pair (N, 2N) for a second-order
/// quantity: `(4 fine - coarse)/3`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Trapezoid with quadratically extrapolated endpoint values.
fn quad(h: f64, f: impl Fn(usize) -> f64, n: usize) -> f64 {
    let interior: f64 = (0..n).map(&f).sum();
    let left = 3.0 * f(0) - 3.0 * f(1) + f(2);
    let right = 3.0 * f(n - 1) - 3.0 * f(n - 2) + f(n - 3);
    h * (interior + 0.25 * (left + right))
}

/// Decay exponent of the transformed wavefunction at a confining tan^2 wall:
/// `phi ~ cos^b`, `b = (lambda + sqrt(lambda^2 + 4 alpha))/(2 lambda)`.
fn confinement_exponent(alpha: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        f64::INFINITY
    } else {
        (lambda + (lambda * lambda + 4.0 * alpha).sqrt()) / (2.0 * lambda)
    }
}

/// Largest chart power with a convergent expectation for this system, and
/// (radial) the smallest one allowed by regularity at the origin.
fn power_window(ham: &DiscreteHamiltonian) -> (f64, f64) {
    match &ham.system {
        SystemKind::Oscillator1d { spec, .. } => {
            let b = confinement_exponent(spec.alpha, spec.params.lambda());
            (-0.5, 2.0 * b - 1.5)
        }
        SystemKind::CoulombRadial { spec, .. } => {
            // origin: |phi|^2 ~ u^{2|m|+1}; equator: |phi|^2 ~ const, r ~ 1/(L-u)
            let m = spec.m.abs() as f64;
            let lo = -(2.0 * m + 2.0) + 1e-9;
            let hi = if spec.params.lambda() == 0.0 {
                f64::INFINITY
            } else {
                1.0 - 1e-9
            };
            (lo, hi)
        }
        SystemKind::OscillatorRadial { spec } => {
            let m = spec.m.abs() as f64;
            let b = confinement_exponent(spec.alpha, spec.params.lambda());
            (-(2.0 * m + 2.0) + 1e-9, 2.0 * b - 1.5)
        }
    }
}

fn check_power(ham: &DiscreteHamiltonian, k_eff: f64, k: i64, weighted: bool) -> Result<(), OracleError> {
    let (lo, hi) = power_window(ham);
    let lo_eff = if ham.system.is_radial() { k as f64 } else { k_eff };
    if lo_eff <= lo || k_eff >= hi {
        return Err(OracleError::MomentDiverges {
            k,
            coordinate: if ham.system.is_radial() { "r" } else { "x" },
            weighted: if weighted { "_lambda" } else { "" },
        });
    }
    if !ham.system.is_radial() && k < 0 {
        return Err(OracleError::MomentDiverges {
            k,
            coordinate: "x",
            weighted: if weighted { "_lambda" } else { "" },
        });
    }
    Ok(())
}

/// `<x^k>` or, weighted, `<(1 + lambda x^2) x^k>` over an eigenstate.
pub fn moment_expectation(
    state: &EigenState,
    ham: &DiscreteHamiltonian,
    k: i64,
    weighted: bool,
) -> Result<f64, OracleError> {
    let k_eff = k as f64 + if weighted { 2.0 } else { 0.0 };
    check_power(ham, k_eff, k, weighted)?;
    Ok(expect_with(state, ham, |x| {
        let w = if weighted {
            1.0 + ham.system.lambda() * x * x
        } else {
            1.0
        };
        x.powi(k as i32) * w
    }))
}

/// Quadrature of an arbitrary chart-coordinate weight against `|phi|^2 du`.
/// No integrability screening; callers check their own integrands.
fn expect_with(state: &EigenState, ham: &DiscreteHamiltonian, f: impl Fn(f64) -> f64) -> f64 {
    let n = state.phi.len();
    quad(
        ham.grid.h(),
        |i| {
            let x = ham.chart_x(i);
            state.phi[i] * state.phi[i] * f(x)
        },
        n,
    )
}

/// Residual of the curved quantum virial identity on an eigenstate:
/// `<A pi^2/2 + pi^2/2 A> + (lambda/2) <A (d + 3 lambda rho^2)>
///  = <A rho V'(rho)>`, `A = 1 + lambda rho^2`, `d` the dimension.
/// The `pi^2` expectations reduce to `2 <A (E - V - [radial] lambda m^2/2)>`.
pub fn virial_residual_quantum(
    state: &EigenState,
    ham: &DiscreteHamiltonian,
) -> Result<f64, OracleError> {
    let lam = ham.system.lambda();
    let dims = if ham.system.is_radial() { 2.0 } else { 1.0 };
    if matches!(ham.system, SystemKind::CoulombRadial { spec, .. } if spec.params.lambda() > 0.0) {
        // the curvature term needs <r^4>-type moments, which the unconfined
        // Coulomb states on the sphere do not possess
        return Err(OracleError::VirialDiverges);
    }
    let ang = if ham.system.is_radial() {
        0.5 * lam * ham.system.m_squared()
    } else {
        0.0
    };
    let e = state.energy;
    let kinetic = 2.0 * expect_with(state, ham, |x| {
        (1.0 + lam * x * x) * (e - ham.system.v_central(x) - ang)
    });
    let curvature = 0.5
        * lam
        * expect_with(state, ham, |x| {
            (1.0 + lam * x * x) * (dims + 3.0 * lam * x * x)
        });
    let force = expect_with(state, ham, |x| {
        (1.0 + lam * x * x) * x * ham.system.dv_central(x)
    });
    Ok(kinetic + curvature - force)
}

/// Residual of the lambda-weighted hypervirial relation at index `k`:
///
/// `2 k E <p^{k-1}>_l - 2 k <p^{k-1} V>_l - <p^k V'>_l
///  + (k/4) [ (k+1)(k+2) lambda^2 <p^{k+1}>_l + 2 k^2 lambda <p^{k-1}>_l
///          + (k-1)(k-2) <p^{k-3}>_l ] = 0`
///
/// with `V` the full line potential, or `V1` for a radial sector. Terms with
/// vanishing scalar coefficients are skipped, which is what keeps the
/// surviving relations integrable (the spec of allowed `k` per system is
/// enforced through the individual moment checks).
pub fn hypervirial_residual_quantum(
    state: &EigenState,
    ham: &DiscreteHamiltonian,
    k: i64,
) -> Result<f64, OracleError> {
    let lam = ham.system.lambda();
    let kf = k as f64;
    let e = state.energy;
    let radial = ham.system.is_radial();
    let (lo, hi) = power_window(ham);
    let veff = |x: f64| ham.system.v_effective(x);
    let dveff = |x: f64| ham.system.dv_effective(x);

    // worst-case power shifts of the potential factors at the two ends:
    // V1 ~ r^-2 (or r^l with beta on) at the origin and -> const at the
    // equator; V1' one power worse at the origin, r^-2 at the equator. On the
    // line the potential grows like x^{l+2}, which tightens the decay bound.
    let (l_pert, beta_on) = match &ham.system {
        SystemKind::Oscillator1d { spec, beta } => (spec.l, *beta != 0.0),
        SystemKind::CoulombRadial { spec, beta } => (spec.l, *beta != 0.0),
        SystemKind::OscillatorRadial { .. } => (2, false),
    };
    let screen = |j: i64, origin_shift: i64, wall_shift: i64| -> Result<(), OracleError> {
        if radial {
            let p_origin = (j + origin_shift) as f64;
            let p_wall = (j + 2 + wall_shift) as f64;
            if p_origin <= lo || p_wall >= hi {
                return Err(OracleError::RelationDiverges { k });
            }
        } else {
            if j + origin_shift.min(0) < 0 {
                return Err(OracleError::RelationDiverges { k });
            }
            if (j + 2 + wall_shift) as f64 >= hi {
                return Err(OracleError::RelationDiverges { k });
            }
        }
        Ok(())
    };
    // potential-factor shifts (origin, wall)
    let v_origin = if radial {
        if beta_on { (-2).min(l_pert) } else { -2 }
    } else {
        0
    };
    let v_wall = if radial {
        0
    } else if beta_on {
        2.max(l_pert + 2)
    } else {
        2
    };
    let dv_origin = v_origin - 1;
    let dv_wall = if radial { -2 } else { v_wall - 1 };

    let mut res = 0.0;
    if kf != 0.0 {
        screen(k - 1, 0, 0)?;
        screen(k - 1, v_origin, v_wall)?;
        let m1 = expect_with(state, ham, |x| (1.0 + lam * x * x) * x.powi(k as i32 - 1));
        res += (2.0 * kf * e + 0.5 * kf.powi(3) * lam) * m1;
        res -= 2.0
            * kf
            * expect_with(state, ham, |x| {
                (1.0 + lam * x * x) * x.powi(k as i32 - 1) * veff(x)
            });
    }
    screen(k, dv_origin, dv_wall)?;
    res -= expect_with(state, ham, |x| {
        (1.0 + lam * x * x) * x.powi(k as i32) * dveff(x)
    });
    let c_up = 0.25 * kf * (kf + 1.0) * (kf + 2.0) * lam * lam;
    if c_up != 0.0 {
        screen(k + 1, 0, 0)?;
        res += c_up * expect_with(state, ham, |x| (1.0 + lam * x * x) * x.powi(k as i32 + 1));
    }
    let c_dn = 0.25 * kf * (kf - 1.0) * (kf - 2.0);
    if c_dn != 0.0 {
        screen(k - 3, 0, 0)?;
        res += c_dn * expect_with(state, ham, |x| (1.0 + lam * x * x) * x.powi(k as i32 - 3));
    }
    Ok(res)
}

/// Rayleigh quotient of the raw, untransformed 1D Hamiltonian
/// `H = pi^2/2 + V` applied to the reconstructed `psi = phi/sqrt(1+lambda
/// x^2)`, with `pi = -i[(1+lambda x^2) d/dx + lambda x]` applied twice as a
/// first-order operator (chain rule through u, fourth-order differences).
/// Agreement with the transformed eigenvalue guards the similarity transform.
pub fn untransformed_rayleigh_1d(state: &EigenState, ham: &DiscreteHamiltonian) -> f64 {
    let lam = ham.system.lambda();
    let h = ham.grid.h();
    let n = state.phi.len();
    let x: Vec<f64> = (0..n).map(|i| ham.chart_x(i)).collect();
    let psi: Vec<f64> = (0..n)
        .map(|i| state.phi[i] / (1.0 + lam * x[i] * x[i]).sqrt())
        .collect();

    // D f = (1 + lambda x^2) df/dx + lambda x f = df/du + lambda x f
    let du4 = |f: &[f64], i: usize| -> f64 {
        if i < 2 || i + 2 >= n {
            return 0.0; // boundary slab dropped from the quotient below
        }
        (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h)
    };
    let dpsi: Vec<f64> = (0..n).map(|i| du4(&psi, i) + lam * x[i] * psi[i]).collect();
    let hpsi: Vec<f64> = (0..n)
        .map(|i| {
            -0.5 * (du4(&dpsi, i) + lam * x[i] * dpsi[i])
                + ham.system.v_central(x[i]) * psi[i]
        })
        .collect();

    // measure dx = (1 + lambda x^2) du; skip the contaminated boundary rows
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 4..n - 4 {
        let w = (1.0 + lam * x[i] * x[i]) * h;
        num += psi[i] * hpsi[i] * w;
        den += psi[i] * psi[i] * w;
    }
    num / den
}
