//! Truncated Taylor jets in one seed parameter.
//!
//! A [`Jet`] holds coefficients `c0..cJ` of a function's Taylor expansion and
//! propagates them through arithmetic exactly (truncated Cauchy products,
//! recursive division and square root). Binary operations truncate to the
//! shorter operand: mixing a jet of remaining order 3 with one of order 5
//! yields order 3, so the validity of every derivative coefficient is tracked
//! by construction. `derivative()` shifts `k*c_k` down one slot and shortens
//! the jet by one; that single lost order per differentiation is what forces
//! the perturbation driver to allocate jets of order >= J up front.

use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum JetError {
    #[error("division requires a nonzero constant term, got {0}")]
    DivisionByZeroTerm(f64),
    #[error("sqrt requires a positive constant term, got {0}")]
    SqrtOfNonPositive(f64),
    #[error("jet of remaining order {have} cannot supply derivative order {want}")]
    InsufficientOrder { have: usize, want: usize },
}

/// Taylor coefficients `c0..cJ` of a scalar function of one seed parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    /// Constant jet: value `v`, all derivatives zero, truncation order `order`.
    pub fn constant(v: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = v;
        Self { coeffs }
    }

    /// Seed variable: value `v`, first derivative 1.
    pub fn variable(v: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = v;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Self { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "jet needs at least a constant term");
        Self { coeffs }
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Remaining truncation order (number of valid derivative coefficients).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Taylor coefficient `c_k`, or 0 beyond the truncation order.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// k-th derivative value `k! c_k`.
    pub fn derivative_value(&self, k: usize) -> Result<f64, JetError> {
        if k > self.order() {
            return Err(JetError::InsufficientOrder {
                have: self.order(),
                want: k,
            });
        }
        Ok(self.coeffs[k] * (1..=k).map(|i| i as f64).product::<f64>())
    }

    /// d/dseed as a jet: coefficients `k*c_k` shifted down, order reduced by one.
    pub fn derivative(&self) -> Result<Jet, JetError> {
        if self.coeffs.len() < 2 {
            return Err(JetError::InsufficientOrder { have: 0, want: 1 });
        }
        Ok(Jet {
            coeffs: (1..self.coeffs.len())
                .map(|k| k as f64 * self.coeffs[k])
                .collect(),
        })
    }

    /// Truncated-Taylor square root; requires `c0 > 0`.
    pub fn sqrt(&self) -> Result<Jet, JetError> {
        if !(self.coeffs[0] > 0.0) {
            return Err(JetError::SqrtOfNonPositive(self.coeffs[0]));
        }
        let n = self.coeffs.len();
        let mut s = vec![0.0; n];
        s[0] = self.coeffs[0].sqrt();
        for k in 1..n {
            let conv: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
            s[k] = (self.coeffs[k] - conv) / (2.0 * s[0]);
        }
        Ok(Jet { coeffs: s })
    }

    /// Checked division; errors when the divisor's constant term vanishes.
    pub fn try_div(&self, rhs: &Jet) -> Result<Jet, JetError> {
        if rhs.coeffs[0] == 0.0 {
            return Err(JetError::DivisionByZeroTerm(rhs.coeffs[0]));
        }
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut q = vec![0.0; n];
        for k in 0..n {
            let conv: f64 = (0..k).map(|j| q[j] * rhs.coeffs[k - j]).sum();
            q[k] = (self.coeffs[k] - conv) / rhs.coeffs[0];
        }
        Ok(Jet { coeffs: q })
    }

    pub fn scale(&self, f: f64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * f).collect(),
        }
    }
}

fn zip(a: &Jet, b: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
    let n = a.coeffs.len().min(b.coeffs.len());
    Jet {
        coeffs: (0..n).map(|i| f(a.coeffs[i], b.coeffs[i])).collect(),
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        zip(self, rhs, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        zip(self, rhs, |a, b| a - b)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, oi) in out.iter_mut().enumerate() {
            *oi = (0..=i).map(|j| self.coeffs[j] * rhs.coeffs[i - j]).sum();
        }
        Jet { coeffs: out }
    }
}

impl Div for &Jet {
    type Output = Jet;
    /// Panics when the divisor's constant term is zero; callers that can hit
    /// resonant denominators must check first and use [`Jet::try_div`].
    fn div(self, rhs: &Jet) -> Jet {
        self.try_div(rhs).expect("jet division by zero constant term")
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += rhs;
        Jet { coeffs }
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}
