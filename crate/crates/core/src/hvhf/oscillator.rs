//! HVHF engine for the one-dimensional curved harmonic oscillator with
//! perturbation `beta x^l (1 + lambda x^2)`, `l` a positive integer.

use super::{energy_from_hf, EnergySeries, HvhfError, MomentTable, SeriesSystem};
use crate::geometry::CurvedParams;
use crate::jet::Jet;
use std::collections::BTreeSet;

/// Curved oscillator `H = pi^2/2 + (alpha/2) x^2 + beta x^l (1 + lambda x^2)`.
#[derive(Debug, Clone, Copy)]
pub struct OscillatorSpec {
    pub alpha: f64,
    pub n: u32,
    pub l: i64,
    pub params: CurvedParams,
}

impl OscillatorSpec {
    pub fn new(alpha: f64, n: u32, l: i64, params: CurvedParams) -> Result<Self, HvhfError> {
        if !(alpha > 0.0) {
            return Err(HvhfError::NonPositiveStiffness(alpha));
        }
        if l <= 0 {
            return Err(HvhfError::WrongExponentSign { l });
        }
        Ok(Self { alpha, n, l, params })
    }

    fn lambda(&self) -> f64 {
        self.params.lambda()
    }
}

/// Unperturbed eigenvalue `(n + 1/2)(lambda + sqrt(lambda^2 + 4 alpha))/2
/// + n^2 lambda / 2` as a jet in alpha of the requested order.
pub fn zeroth_energy_oscillator(
    spec: &OscillatorSpec,
    order: usize,
) -> Result<Jet, HvhfError> {
    let lam = spec.lambda();
    let alpha = Jet::variable(spec.alpha, order);
    let w = (&(&alpha * 4.0) + lam * lam).sqrt()?;
    let n = spec.n as f64;
    Ok(&(&(&w + lam) * ((n + 0.5) / 2.0)) + n * n * lam / 2.0)
}

/// Term coefficients of the 1D moment recurrence at index `k`, all scalar
/// except the leading one (which carries the alpha dependence and is built by
/// the caller as a jet). Solving for `Q_gamma^{k+1}`:
///
/// `lead * Q_gamma^{k+1} = energy_sum * sum_j E^(j) Q_{gamma-j}^{k-1}
///   + lower1 * Q_gamma^{k-1} + lower3 * Q_gamma^{k-3}
///   + beta_low * Q_{gamma-1}^{k+l-1} + beta_high * Q_{gamma-1}^{k+l+1}`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceCoeffs1d {
    /// scalar part of the lead: `-(k/4)(k+1)(k+2) lambda^2`; the full lead is
    /// `(k+1) alpha + lead_lambda`
    pub lead_lambda: f64,
    pub lead_alpha_factor: f64,
    pub energy_sum: f64,
    pub lower1: f64,
    pub lower3: f64,
    pub beta_low: f64,
    pub beta_high: f64,
}

pub fn recurrence_coefficients_1d(k: i64, l: i64, lambda: f64) -> RecurrenceCoeffs1d {
    let kf = k as f64;
    RecurrenceCoeffs1d {
        lead_lambda: -kf / 4.0 * (kf + 1.0) * (kf + 2.0) * lambda * lambda,
        lead_alpha_factor: kf + 1.0,
        energy_sum: 2.0 * kf,
        lower1: kf.powi(3) / 2.0 * lambda,
        lower3: kf / 4.0 * (kf - 1.0) * (kf - 2.0),
        beta_low: -(2.0 * kf + l as f64),
        beta_high: -lambda * (2.0 * kf + l as f64 + 2.0),
    }
}

fn lead_jet(coeffs: &RecurrenceCoeffs1d, alpha: &Jet) -> Jet {
    &(alpha * coeffs.lead_alpha_factor) + coeffs.lead_lambda
}

/// One recurrence step: returns `Q_gamma^{k+1}` from entries already in the
/// table. Errors on a vanishing leading coefficient (curvature resonance)
/// instead of dividing.
pub fn recurrence_step_1d(
    table: &MomentTable,
    energy: &[Jet],
    k: i64,
    gamma: usize,
    spec: &OscillatorSpec,
    alpha_jet: &Jet,
) -> Result<Jet, HvhfError> {
    let c = recurrence_coefficients_1d(k, spec.l, spec.lambda());
    let den = lead_jet(&c, alpha_jet);
    let scale = c.lead_alpha_factor.abs() * spec.alpha + c.lead_lambda.abs() + f64::MIN_POSITIVE;
    if den.value().abs() <= 1e-10 * scale {
        return Err(HvhfError::CurvatureResonance {
            gamma,
            k,
            denominator: den.value(),
        });
    }

    let mut rhs = Jet::constant(0.0, table.zero_order());
    if c.energy_sum != 0.0 {
        let mut acc = Jet::constant(0.0, table.zero_order());
        for j in 0..=gamma {
            let q = table.get_or_zero((gamma - j) as i64, k - 1, true)?;
            acc = &acc + &(&energy[j] * &q);
        }
        rhs = &rhs + &acc.scale(c.energy_sum);
    }
    if c.lower1 != 0.0 {
        rhs = &rhs + &table.get_or_zero(gamma as i64, k - 1, true)?.scale(c.lower1);
    }
    if c.lower3 != 0.0 {
        rhs = &rhs + &table.get_or_zero(gamma as i64, k - 3, true)?.scale(c.lower3);
    }
    if gamma >= 1 {
        if c.beta_low != 0.0 {
            rhs = &rhs
                + &table
                    .get_or_zero(gamma as i64 - 1, k + spec.l - 1, true)?
                    .scale(c.beta_low);
        }
        if c.beta_high != 0.0 {
            rhs = &rhs
                + &table
                    .get_or_zero(gamma as i64 - 1, k + spec.l + 1, true)?
                    .scale(c.beta_high);
        }
    }
    Ok(rhs.try_div(&den)?)
}

/// Row seed `Q_gamma^0 = delta_{gamma 0} + 2 lambda dE^(gamma)/dalpha`.
/// Consumes one derivative order of the energy jet.
pub fn bootstrap_moment_oscillator(
    energy: &[Jet],
    spec: &OscillatorSpec,
    gamma: usize,
) -> Result<Jet, HvhfError> {
    let de = energy[gamma]
        .derivative()
        .map_err(|source| HvhfError::Truncation { gamma, source })?;
    let base = de.scale(2.0 * spec.lambda());
    Ok(if gamma == 0 { &base + 1.0 } else { base })
}

/// Moments the order-`gamma` row must contain so that `E^(J)` is reachable.
/// Walks the dependency graph backwards from `Q_{J-1}^l`, skipping terms whose
/// scalar coefficient vanishes, and returns the per-row maximum index. Every
/// `k` from 0 to that maximum is produced anyway since the energy-sum term
/// couples neighbouring indices while walking up.
fn dependency_walk(spec: &OscillatorSpec, order: usize) -> Vec<i64> {
    let lam = spec.lambda();
    let mut needed: BTreeSet<(usize, i64)> = BTreeSet::new();
    let mut stack = vec![(order - 1, spec.l)];
    while let Some((gamma, k)) = stack.pop() {
        if k < 0 || !needed.insert((gamma, k)) {
            continue;
        }
        if k == 0 {
            continue; // bootstrap seed
        }
        // produced by the relation at index k-1
        let c = recurrence_coefficients_1d(k - 1, spec.l, lam);
        if c.energy_sum != 0.0 {
            for j in 0..=gamma {
                stack.push((gamma - j, k - 2));
            }
        }
        if c.lower1 != 0.0 {
            stack.push((gamma, k - 2));
        }
        if c.lower3 != 0.0 {
            stack.push((gamma, k - 4));
        }
        if gamma >= 1 {
            if c.beta_low != 0.0 {
                stack.push((gamma - 1, k - 2 + spec.l));
            }
            if c.beta_high != 0.0 {
                stack.push((gamma - 1, k + spec.l));
            }
        }
    }
    (0..order)
        .map(|g| {
            needed
                .iter()
                .filter(|(gamma, _)| *gamma == g)
                .map(|&(_, k)| k)
                .max()
                .unwrap_or(0)
        })
        .collect()
}

/// Full driver: bootstrap, recurrence sweeps and HF updates up to order `J`.
pub fn perturbation_series_oscillator(
    spec: &OscillatorSpec,
    order: usize,
) -> Result<(EnergySeries, MomentTable), HvhfError> {
    if order < 1 {
        return Err(HvhfError::OrderTooSmall(order));
    }
    let alpha_jet = Jet::variable(spec.alpha, order);
    let mut table = MomentTable::new(spec.lambda(), order);
    let mut energy = vec![zeroth_energy_oscillator(spec, order)?];
    let kmax = dependency_walk(spec, order);

    for gamma in 0..order {
        let seed = bootstrap_moment_oscillator(&energy, spec, gamma)?;
        table.insert(gamma, 0, seed);
        for k in 0..kmax[gamma] {
            let q = recurrence_step_1d(&table, &energy, k, gamma, spec, &alpha_jet)?;
            table.insert(gamma, k + 1, q);
        }
        energy.push(energy_from_hf(&table, gamma + 1, spec.l)?);
    }
    Ok((
        EnergySeries::new(energy, SeriesSystem::Oscillator1d),
        table,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(alpha: f64, n: u32, lambda: f64) -> OscillatorSpec {
        OscillatorSpec::new(alpha, n, 1, CurvedParams::new(lambda).unwrap()).unwrap()
    }

    #[test]
    fn zeroth_energy_values() {
        // flat ground state
        let e = zeroth_energy_oscillator(&spec(1.0, 0, 0.0), 2).unwrap();
        assert_relative_eq!(e.value(), 0.5, epsilon = 1e-15);
        // curved ground state, frozen from the closed form
        let e = zeroth_energy_oscillator(&spec(1.0, 0, 0.1), 2).unwrap();
        assert_relative_eq!(e.value(), 0.5256246098625197, epsilon = 1e-14);
        // alpha-derivative (n + 1/2)/sqrt(lambda^2 + 4 alpha); the spec of the
        // central-difference oracle is exercised in the integration tests
        let d = e.derivative().unwrap().value();
        assert_relative_eq!(d, 0.5 / (0.01f64 + 4.0).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(d, 0.24968807872225587, epsilon = 1e-12);
    }

    #[test]
    fn zeroth_energy_derivative_matches_central_difference() {
        let s = spec(1.0, 0, 0.1);
        let e = zeroth_energy_oscillator(&s, 1).unwrap();
        let h = 1e-6;
        let ep = zeroth_energy_oscillator(&spec(1.0 + h, 0, 0.1), 0).unwrap();
        let em = zeroth_energy_oscillator(&spec(1.0 - h, 0, 0.1), 0).unwrap();
        let fd = (ep.value() - em.value()) / (2.0 * h);
        assert_relative_eq!(e.derivative().unwrap().value(), fd, epsilon = 1e-6);
    }

    #[test]
    fn bootstrap_q00_closed_form() {
        // Q_0^0 = 1 + (2n+1) lambda / sqrt(lambda^2 + 4 alpha)
        let s = spec(1.0, 0, 0.1);
        let energy = vec![zeroth_energy_oscillator(&s, 2).unwrap()];
        let q = bootstrap_moment_oscillator(&energy, &s, 0).unwrap();
        assert_relative_eq!(q.value(), 1.0499376169438445, epsilon = 1e-12);
        // and Q_0^0 >= 1 whenever lambda >= 0
        assert!(q.value() >= 1.0);
    }

    #[test]
    fn first_recurrence_steps() {
        let s = spec(1.0, 0, 0.1);
        let (series, table) = perturbation_series_oscillator(&s, 2).unwrap();
        // k=0 relation: Q_0^1 = 0 exactly
        assert_eq!(table.get(0, 1).unwrap().value(), 0.0);
        // k=1 relation at gamma=0 against the direct wavefunction moments
        // (w + lambda) / (w (w - 2 lambda)), w = sqrt(lambda^2 + 4 alpha)
        let w = (0.01f64 + 4.0).sqrt();
        let q02 = (w + 0.1) / (w * (w - 2.0 * 0.1));
        assert_relative_eq!(table.get(0, 2).unwrap().value(), q02, epsilon = 1e-13);
        let _ = series;
    }

    #[test]
    fn flat_q02_reduces_to_half_inverse_sqrt_alpha() {
        // Q_0^2 -> (2n+1)/(2 sqrt(alpha)) at lambda = 0
        for n in 0..3u32 {
            let s = spec(1.0, n, 0.0);
            let (_, table) = perturbation_series_oscillator(&s, 2).unwrap();
            assert_relative_eq!(
                table.get(0, 2).unwrap().value(),
                (2.0 * n as f64 + 1.0) / 2.0,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn known_zeros_are_exact() {
        let (series, _) = perturbation_series_oscillator(&spec(1.3, 2, 0.17), 4).unwrap();
        assert_eq!(series.coeff(1), 0.0);
        assert_eq!(series.coeff(3), 0.0);
    }

    #[test]
    fn second_order_frozen_value() {
        let (series, _) = perturbation_series_oscillator(&spec(1.0, 0, 0.1), 2).unwrap();
        assert_relative_eq!(series.coeff(2), -0.612342333516235, epsilon = 1e-13);
    }

    #[test]
    fn fourth_order_frozen_value() {
        // validated against the oracle by the beta-scaling integration test
        let (series, _) = perturbation_series_oscillator(&spec(1.0, 0, 0.1), 4).unwrap();
        assert_relative_eq!(series.coeff(4), -0.172931345021065, epsilon = 1e-12);
    }

    #[test]
    fn flat_series_is_exact_shift() {
        // lambda = 0, l = 1: completing the square gives E^(2) = -1/(2 alpha),
        // all higher coefficients zero
        for alpha in [0.5, 1.0, 2.0] {
            let (series, _) =
                perturbation_series_oscillator(&spec(alpha, 1, 0.0), 5).unwrap();
            assert_relative_eq!(series.coeff(2), -0.5 / alpha, epsilon = 1e-13);
            assert_eq!(series.coeff(3), 0.0);
            assert!(series.coeff(4).abs() < 1e-13);
            assert_eq!(series.coeff(5), 0.0);
        }
    }

    #[test]
    fn parity_kills_odd_moments_at_order_zero() {
        let (_, table) = perturbation_series_oscillator(&spec(1.0, 1, 0.2), 4).unwrap();
        for ((gamma, k), jet) in table.iter() {
            if *gamma == 0 && k % 2 == 1 {
                assert_eq!(jet.value(), 0.0, "Q_0^{k} should vanish by parity");
            }
        }
    }

    #[test]
    fn curvature_resonance_is_reported() {
        // 4 alpha = 3 lambda^2 makes the k=1 lead vanish
        let lam = 2.0;
        let s = OscillatorSpec::new(3.0 * lam * lam / 4.0, 0, 1, CurvedParams::new(lam).unwrap())
            .unwrap();
        let err = perturbation_series_oscillator(&s, 2).unwrap_err();
        match err {
            HvhfError::CurvatureResonance { k, .. } => assert_eq!(k, 1),
            other => panic!("expected curvature resonance, got {other}"),
        }
    }

    #[test]
    fn spec_validation() {
        let p = CurvedParams::new(0.1).unwrap();
        assert!(OscillatorSpec::new(0.0, 0, 1, p).is_err());
        assert!(OscillatorSpec::new(1.0, 0, -1, p).is_err());
        assert!(OscillatorSpec::new(1.0, 0, 0, p).is_err());
    }

    #[test]
    fn dependency_walk_minimal_rows() {
        // J=2, l=1: row 0 must reach k=2 (for the beta-terms of Q_1^1), row 1
        // only k=1
        let s = spec(1.0, 0, 0.1);
        let kmax = dependency_walk(&s, 2);
        assert_eq!(kmax, vec![2, 1]);
    }

    #[test]
    fn truncation_error_when_order_exhausted() {
        // hand-build an energy jet with no derivative left
        let s = spec(1.0, 0, 0.1);
        let energy = vec![Jet::constant(0.5, 0)];
        let err = bootstrap_moment_oscillator(&energy, &s, 0).unwrap_err();
        assert!(matches!(err, HvhfError::Truncation { gamma: 0, .. }));
    }
}
