//! Budget uncertainty set `{c ∘ (1 + ζ) : ‖ζ‖∞ ≤ ρ, ‖ζ‖₁ ≤ Γ}`.
//!
//! Coefficient `i` can move by at most `ρ|c_i|` against the decision maker,
//! so zero coefficients never deviate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Decision;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyParams {
    /// Per-coefficient relative deviation bound.
    pub rho: f64,
    /// Total relative deviation budget.
    pub gamma: f64,
}

impl UncertaintyParams {
    pub fn new(rho: f64, gamma: f64) -> Result<Self> {
        let u = Self { rho, gamma };
        u.validate()?;
        Ok(u)
    }

    /// `ρ` with `Γ = gamma_frac · n`.
    pub fn with_budget_fraction(rho: f64, gamma_frac: f64, n: usize) -> Result<Self> {
        Self::new(rho, gamma_frac * n as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rho must be >= 0, got {}",
                self.rho
            )));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// `c^T x` plus the fractional-knapsack worst-case deviation.
pub(super) fn worst_case_cost(c: &[f64], x: &Decision, u: &UncertaintyParams) -> f64 {
    let base: f64 = c
        .iter()
        .zip(&x.0)
        .filter(|(_, &b)| b)
        .map(|(v, _)| *v)
        .sum();
    let mut mags: Vec<f64> = c
        .iter()
        .zip(&x.0)
        .filter(|(_, &b)| b)
        .map(|(v, _)| v.abs())
        .collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut budget = u.gamma;
    let mut extra = 0.0;
    for m in mags {
        if budget <= 0.0 {
            break;
        }
        let take = u.rho.min(budget);
        extra += m * take;
        budget -= take;
    }
    base + extra
}

/// Sorted distinct thresholds `{ρ|c_i|} ∪ {0}`.
pub(super) fn thresholds(c: &[f64], rho: f64) -> Vec<f64> {
    let mut t: Vec<f64> = c.iter().map(|v| rho * v.abs()).collect();
    t.push(0.0);
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

pub(super) fn adjusted_costs(c: &[f64], rho: f64, theta: f64) -> crate::types::CostVector {
    c.iter()
        .map(|&v| v + (rho * v.abs() - theta).max(0.0))
        .collect::<Vec<f64>>()
        .into()
}
