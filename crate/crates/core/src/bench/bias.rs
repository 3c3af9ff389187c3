//! Monte Carlo for the variance bias of the empirical argmin.
//!
//! `n_h` decisions have cost `N(0, σ_h²)` and `n_l` have `N(0, σ_l²)`. All
//! have the same mean, yet the high-variance ones win the argmin more often.
//! As `σ_l → 0` each high-variance decision wins with probability
//! `(1/n_h)(1 − 2^{−n_h})` and each low-variance one with `(1/n_l) 2^{−n_h}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::{Oracle, ProblemInstance};
use crate::rng::{streams, RngStream};
use crate::types::CostVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasDemoConfig {
    pub n_h: usize,
    pub n_l: usize,
    pub sigma_h: f64,
    pub sigma_l: f64,
    pub trials: u64,
    pub seed: u64,
}

impl BiasDemoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_h == 0 || self.n_l == 0 {
            return Err(Error::InvalidParameter(
                "bias demo needs n_h >= 1 and n_l >= 1".into(),
            ));
        }
        if !(self.sigma_h >= 0.0 && self.sigma_l >= 0.0)
            || !self.sigma_h.is_finite()
            || !self.sigma_l.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "standard deviations must be finite and >= 0, got {} and {}",
                self.sigma_h, self.sigma_l
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter(
                "bias demo needs trials >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasDemoReport {
    pub config: BiasDemoConfig,
    /// Wins per decision; high-variance decisions come first.
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub mean_high_frequency: f64,
    pub mean_low_frequency: f64,
    pub limit_high: f64,
    pub limit_low: f64,
}

pub fn bias_demo(cfg: &BiasDemoConfig) -> Result<BiasDemoReport> {
    cfg.validate()?;
    let n = cfg.n_h + cfg.n_l;
    let oracle = Oracle::new(ProblemInstance::select(n)?);
    let mut rng = RngStream::new(cfg.seed, streams::BIAS_DEMO);
    let mut counts = vec![0u64; n];
    let mut c = CostVector::zeros(n);
    for _ in 0..cfg.trials {
        for (i, ci) in c.0.iter_mut().enumerate() {
            let sigma = if i < cfg.n_h {
                cfg.sigma_h
            } else {
                cfg.sigma_l
            };
            *ci = sigma * rng.normal();
        }
        let x = oracle.solve(&c)?;
        let winner = x.0.iter().position(|&b| b).ok_or(Error::Infeasible)?;
        counts[winner] += 1;
    }
    let trials = cfg.trials as f64;
    let frequencies: Vec<f64> = counts.iter().map(|&k| k as f64 / trials).collect();
    let mean = |f: &[f64]| f.iter().sum::<f64>() / f.len() as f64;
    let half_pow = 0.5f64.powi(cfg.n_h as i32);
    Ok(BiasDemoReport {
        config: cfg.clone(),
        mean_high_frequency: mean(&frequencies[..cfg.n_h]),
        mean_low_frequency: mean(&frequencies[cfg.n_h..]),
        limit_high: (1.0 - half_pow) / cfg.n_h as f64,
        limit_low: half_pow / cfg.n_l as f64,
        counts,
        frequencies,
    })
}
