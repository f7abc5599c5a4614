//! Hypervirial + Hellmann-Feynman perturbation engine.
//!
//! Computes the coefficients `E^(j)` of the eigenvalue expansion
//! `E = sum_j beta^j E^(j)` for a perturbation `beta x^l (1 + lambda x^2)`
//! of the curved harmonic oscillator (1D, `l > 0`) and
//! `beta r^l (1 + lambda r^2)` of the curved Coulomb system (2D radial,
//! `l < 0`), without ever constructing wavefunctions. The moment recurrence
//! supplies each row of lambda-weighted moments `Q_gamma^k`, the
//! Hellmann-Feynman step converts the last computed moment into the next
//! energy coefficient, and a bootstrap seeds each row from a parameter
//! derivative of the energy, carried exactly by [`Jet`] arithmetic.

mod coulomb;
mod oscillator;

pub use coulomb::{
    perturbation_series_coulomb, recurrence_step_2d, zeroth_energy_coulomb, CoulombSpec,
};
pub use oscillator::{
    bootstrap_moment_oscillator, perturbation_series_oscillator, recurrence_coefficients_1d,
    recurrence_step_1d, zeroth_energy_oscillator, OscillatorSpec, RecurrenceCoeffs1d,
};

use crate::jet::{Jet, JetError};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HvhfError {
    #[error("oscillator stiffness must be positive, got {0}")]
    NonPositiveStiffness(f64),
    #[error("coulomb strength must be positive, got {0}")]
    NonPositiveStrength(f64),
    #[error("angular quantum number must be nonzero")]
    ZeroAngularNumber,
    #[error("perturbation exponent {l} has the wrong sign for this system")]
    WrongExponentSign { l: i64 },
    #[error("series order must be at least 1, got {0}")]
    OrderTooSmall(usize),
    #[error("zeroth order comes from the closed form, not the HF step")]
    HfAtOrderZero,
    #[error(
        "curvature resonance at (gamma={gamma}, k={k}): leading coefficient {denominator:.3e} vanishes"
    )]
    CurvatureResonance {
        gamma: usize,
        k: i64,
        denominator: f64,
    },
    #[error("angular resonance at k={k} for m={m}: solve-for coefficient vanishes")]
    AngularResonance { k: i64, m: i64 },
    #[error("moment (gamma={gamma}, k={k}) is unreachable from the available seeds")]
    UnreachableMoment { gamma: usize, k: i64 },
    #[error("missing table entry (gamma={gamma}, k={k})")]
    MissingEntry { gamma: usize, k: i64 },
    #[error("jet truncation exhausted at order gamma={gamma}: {source}")]
    Truncation { gamma: usize, source: JetError },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Table of moment-expansion coefficients `Q_gamma^k`: the coefficient of
/// `beta^gamma` in the lambda-weighted moment `<x^k>_lambda` (or `<r^k>_lambda`),
/// each carried as a jet in the seed parameter. Entries with `gamma < 0` or,
/// for the oscillator, `k < 0`, are identically zero by convention and are not
/// stored.
#[derive(Debug, Clone)]
pub struct MomentTable {
    entries: BTreeMap<(usize, i64), Jet>,
    lambda: f64,
    zero_order: usize,
}

impl MomentTable {
    pub fn new(lambda: f64, zero_order: usize) -> Self {
        Self {
            entries: BTreeMap::new(),
            lambda,
            zero_order,
        }
    }

    /// Curvature of the weight convention `<f>_lambda = <(1 + lambda x^2) f>`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn insert(&mut self, gamma: usize, k: i64, value: Jet) {
        self.entries.insert((gamma, k), value);
    }

    pub fn get(&self, gamma: usize, k: i64) -> Option<&Jet> {
        self.entries.get(&(gamma, k))
    }

    /// Entry lookup honoring the zero conventions; `Err` only for entries the
    /// conventions do not cover.
    pub fn get_or_zero(&self, gamma: i64, k: i64, zero_negative_k: bool) -> Result<Jet, HvhfError> {
        if gamma < 0 || (zero_negative_k && k < 0) {
            return Ok(Jet::constant(0.0, self.zero_order));
        }
        self.entries
            .get(&(gamma as usize, k))
            .cloned()
            .ok_or(HvhfError::MissingEntry {
                gamma: gamma as usize,
                k,
            })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, i64), &Jet)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn zero_order(&self) -> usize {
        self.zero_order
    }
}

/// Which system an [`EnergySeries`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesSystem {
    Oscillator1d,
    Coulomb2d,
}

/// Coefficients `E^(0)..E^(J)` of the beta-expansion of one eigenvalue,
/// kept as jets in the seed parameter (alpha for the oscillator, mu = m^2
/// for the Coulomb system). Later coefficients carry fewer derivative orders:
/// each bootstrap consumed one.
#[derive(Debug, Clone)]
pub struct EnergySeries {
    jets: Vec<Jet>,
    system: SeriesSystem,
}

impl EnergySeries {
    pub fn new(jets: Vec<Jet>, system: SeriesSystem) -> Self {
        assert!(!jets.is_empty());
        Self { jets, system }
    }

    pub fn order(&self) -> usize {
        self.jets.len() - 1
    }

    pub fn system(&self) -> SeriesSystem {
        self.system
    }

    pub fn coeff(&self, j: usize) -> f64 {
        self.jets[j].value()
    }

    pub fn coeffs(&self) -> Vec<f64> {
        self.jets.iter().map(Jet::value).collect()
    }

    pub fn jet(&self, j: usize) -> &Jet {
        &self.jets[j]
    }

    /// Plain truncated sum `sum_j beta^j E^(j)`; no resummation.
    pub fn evaluate(&self, beta: f64) -> f64 {
        evaluate_series(self, beta)
    }
}

/// Truncated evaluation of the series at coupling `beta`.
pub fn evaluate_series(series: &EnergySeries, beta: f64) -> f64 {
    series
        .jets
        .iter()
        .rev()
        .fold(0.0, |acc, jet| acc * beta + jet.value())
}

/// HF update: `E^(j) = Q_{j-1}^l / j`.
pub fn energy_from_hf(table: &MomentTable, j: usize, l: i64) -> Result<Jet, HvhfError> {
    if j == 0 {
        return Err(HvhfError::HfAtOrderZero);
    }
    let q = table
        .get(j - 1, l)
        .ok_or(HvhfError::MissingEntry { gamma: j - 1, k: l })?;
    Ok(q.scale(1.0 / j as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_series_is_truncated_sum() {
        let jets = vec![
            Jet::constant(1.0, 0),
            Jet::constant(-2.0, 0),
            Jet::constant(0.5, 0),
        ];
        let s = EnergySeries::new(jets, SeriesSystem::Oscillator1d);
        assert_eq!(s.evaluate(0.0), 1.0);
        let b = 0.1;
        assert!((s.evaluate(b) - (1.0 - 2.0 * b + 0.5 * b * b)).abs() < 1e-15);
    }

    #[test]
    fn hf_rejects_order_zero() {
        let table = MomentTable::new(0.1, 3);
        assert!(matches!(
            energy_from_hf(&table, 0, 1),
            Err(HvhfError::HfAtOrderZero)
        ));
    }

    #[test]
    fn table_zero_conventions() {
        let table = MomentTable::new(0.1, 3);
        assert_eq!(table.get_or_zero(-1, 5, true).unwrap().value(), 0.0);
        assert_eq!(table.get_or_zero(0, -2, true).unwrap().value(), 0.0);
        assert!(table.get_or_zero(0, 2, true).is_err());
        // radial tables keep negative k
        assert!(table.get_or_zero(0, -2, false).is_err());
    }
}
