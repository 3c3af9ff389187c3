//! Gradients with respect to the predicted cost `ĉ`.
//!
//! The target list replaces `x*(c)` by the mean target decision `x̄`. For
//! k-NN targets SPO+ also uses the mean target cost inside its second solve,
//! so every engine still costs one nominal solve per sample (PFYL: `M`).

use crate::error::{check_len, Error, Result};
use crate::oracles::Oracle;
use crate::rng::RngStream;
use crate::targets::{Target, TargetPolicy};
use crate::types::{dot, CostVector};

fn non_empty(targets: &[Target]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::InvalidParameter("empty target list".into()));
    }
    Ok(())
}

/// Running mean; exact whenever all inputs are identical.
fn running_mean<'a>(rows: impl Iterator<Item = Vec<f64>> + 'a) -> Vec<f64> {
    let mut mean: Vec<f64> = Vec::new();
    for (j, row) in rows.enumerate() {
        if j == 0 {
            mean = row;
            continue;
        }
        let w = (j + 1) as f64;
        for (m, v) in mean.iter_mut().zip(row) {
            *m += (v - *m) / w;
        }
    }
    mean
}

/// `x̄`, the mean of the target decisions.
pub fn mean_target_decision(targets: &[Target]) -> Vec<f64> {
    running_mean(targets.iter().map(|t| t.decision.to_f64()))
}

/// Mean of the target costs.
pub fn mean_target_cost(targets: &[Target]) -> CostVector {
    CostVector(running_mean(targets.iter().map(|t| t.cost.0.clone())))
}

/// `2 (x̄ − x*(2ĉ − c_ref))` with `c_ref = c` except for k-NN targets, where
/// it is the mean neighbour cost.
pub fn spo_plus_gradient(
    policy: &TargetPolicy,
    targets: &[Target],
    c: &CostVector,
    chat: &CostVector,
    oracle: &Oracle,
) -> Result<Vec<f64>> {
    non_empty(targets)?;
    check_len("predicted costs", c.len(), chat.len())?;
    let c_ref = match policy {
        TargetPolicy::Knn { .. } => mean_target_cost(targets),
        _ => c.clone(),
    };
    let x_bar = mean_target_decision(targets);
    let probe = chat.combine(2.0, &c_ref, -1.0);
    let x = oracle.solve(&probe)?;
    Ok(x_bar
        .iter()
        .zip(&x.0)
        .map(|(a, &b)| 2.0 * (a - if b { 1.0 } else { 0.0 }))
        .collect())
}

/// `x̄ − (1/M) Σ x*(ĉ + σ ζ_i)` with standard normal `ζ_i` drawn from `noise`.
pub fn pfyl_gradient(
    targets: &[Target],
    chat: &CostVector,
    oracle: &Oracle,
    samples: usize,
    sigma: f64,
    noise: &mut RngStream,
) -> Result<Vec<f64>> {
    non_empty(targets)?;
    if samples == 0 || sigma.is_nan() || sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "PFYL needs M >= 1 and sigma >= 0, got M = {samples}, sigma = {sigma}"
        )));
    }
    let x_bar = mean_target_decision(targets);
    let mut perturbed = Vec::with_capacity(samples);
    for _ in 0..samples {
        let c: Vec<f64> = chat.0.iter().map(|v| v + sigma * noise.normal()).collect();
        perturbed.push(oracle.solve(&CostVector(c))?.to_f64());
    }
    let mean = running_mean(perturbed.into_iter());
    Ok(x_bar.iter().zip(&mean).map(|(a, b)| a - b).collect())
}

/// Gradient of `(1/n) ‖ĉ − c‖²`.
pub fn mse_gradient(c: &CostVector, chat: &CostVector) -> Result<Vec<f64>> {
    check_len("predicted costs", c.len(), chat.len())?;
    let scale = 2.0 / c.len() as f64;
    Ok(chat
        .0
        .iter()
        .zip(&c.0)
        .map(|(p, t)| scale * (p - t))
        .collect())
}

/// Regret of `x*(ĉ)` averaged over the target list:
/// `(1/k) Σ_j c_j^T (x*(ĉ) − x_j)` where `(c_j, x_j)` are the targets.
///
/// This covers every policy: empirical, robust and top-k targets carry the
/// realized `c`, k-NN targets carry the interpolated costs.
pub fn loss_value(targets: &[Target], chat: &CostVector, oracle: &Oracle) -> Result<f64> {
    non_empty(targets)?;
    let x_hat = oracle.solve(chat)?;
    let mut total = 0.0;
    for t in targets {
        total += dot(&t.cost, &x_hat)? - dot(&t.cost, &t.decision)?;
    }
    Ok(total / targets.len() as f64)
}
