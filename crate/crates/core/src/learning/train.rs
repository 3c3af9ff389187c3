//! Deterministic minibatch training with validation-based model selection.

use serde::{Deserialize, Serialize};

use crate::bench::eval::{normalized_regret, optimal_objectives, sample_regrets};
use crate::error::{check_len, Error, Result};
use crate::learning::{mse_gradient, pfyl_gradient, spo_plus_gradient, AdamState, LinearPredictor};
use crate::oracles::{Oracle, SolveCounts};
use crate::rng::{streams, RngStream};
use crate::targets::{TargetPolicy, TargetSet};
use crate::types::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    SpoPlus,
    Pfyl {
        samples: usize,
        sigma: f64,
    },
    /// Prediction-focused baseline on mean squared error.
    Mse,
}

impl Method {
    pub fn pfyl_default() -> Self {
        Method::Pfyl {
            samples: 1,
            sigma: 1.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Method::SpoPlus => "spo+",
            Method::Pfyl { .. } => "pfyl",
            Method::Mse => "pfl",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub method: Method,
    pub policy: TargetPolicy,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    pub shuffle: bool,
    pub use_bias: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            method: Method::SpoPlus,
            policy: TargetPolicy::Empirical,
            epochs: 200,
            batch_size: 32,
            lr: 0.01,
            seed: 0,
            shuffle: true,
            use_bias: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_regret_pct: f64,
    pub val_regret_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub predictor: LinearPredictor,
    /// Epoch whose parameters are kept (0 when no epoch ran).
    pub best_epoch: usize,
    pub history: Vec<EpochRecord>,
    pub solves: SolveCounts,
    pub config: TrainConfig,
}

/// Trains a linear predictor from zero initialization.
///
/// Gradient-path solves are `t·s` for SPO+, `t·s·M` for PFYL and zero for
/// MSE. Solves spent on per-epoch train/validation regret are reported
/// separately under `solves.evaluation`.
pub fn train(
    cfg: &TrainConfig,
    train_ds: &Dataset,
    val_ds: &Dataset,
    oracle: &Oracle,
    targets: &TargetSet,
) -> Result<TrainedModel> {
    if train_ds.is_empty() || val_ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if cfg.batch_size == 0 {
        return Err(Error::InvalidParameter("batch size must be >= 1".into()));
    }
    let (n, m) = (oracle.num_vars(), train_ds.meta.m);
    check_len("training cost vectors", n, train_ds.meta.n)?;
    check_len("validation cost vectors", n, val_ds.meta.n)?;
    check_len("validation features", m, val_ds.meta.m)?;
    check_len("target set", train_ds.len(), targets.len())?;
    if cfg.method != Method::Mse && targets.policy != cfg.policy {
        return Err(Error::InvalidParameter(format!(
            "targets were built for {:?}, config asks for {:?}",
            targets.policy, cfg.policy
        )));
    }

    let grad_oracle = oracle.clone();
    let eval_oracle = oracle.clone();
    let mut predictor = LinearPredictor::zeros(n, m, cfg.use_bias);
    let mut adam = AdamState::new(predictor.num_params(), cfg.lr);
    let mut shuffle = RngStream::new(cfg.seed, streams::SHUFFLE);
    let mut noise = RngStream::new(cfg.seed, streams::PFYL_NOISE);

    let (train_opt, val_opt) = if cfg.epochs > 0 {
        (
            optimal_objectives(train_ds, &eval_oracle)?,
            optimal_objectives(val_ds, &eval_oracle)?,
        )
    } else {
        (Vec::new(), Vec::new())
    };

    let mut best = (predictor.clone(), 0usize, f64::INFINITY);
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..train_ds.len()).collect();
    let mut grad = vec![0.0; predictor.num_params()];

    for epoch in 1..=cfg.epochs {
        if cfg.shuffle {
            shuffle.shuffle(&mut order);
        }
        for batch in order.chunks(cfg.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                let sample = &train_ds.samples[i];
                let chat = predictor.predict(&sample.z)?;
                if !chat.is_finite() {
                    return Err(Error::NonFinite {
                        context: format!("prediction for sample {i} in epoch {epoch}"),
                    });
                }
                let ts = &targets.per_sample[i];
                let g = match cfg.method {
                    Method::SpoPlus => {
                        spo_plus_gradient(&cfg.policy, ts, &sample.c, &chat, &grad_oracle)?
                    }
                    Method::Pfyl { samples, sigma } => {
                        pfyl_gradient(ts, &chat, &grad_oracle, samples, sigma, &mut noise)?
                    }
                    Method::Mse => mse_gradient(&sample.c, &chat)?,
                };
                if let Some(r) = g.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFinite {
                        context: format!("gradient entry {r} for sample {i} in epoch {epoch}"),
                    });
                }
                let z = sample.z.as_slice();
                for (r, gr) in g.iter().enumerate() {
                    for (j, zj) in z.iter().enumerate() {
                        grad[r * m + j] += gr * zj;
                    }
                }
                if cfg.use_bias {
                    for (r, gr) in g.iter().enumerate() {
                        grad[n * m + r] += gr;
                    }
                }
            }
            let scale = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            predictor.with_params(|p| adam.step(p, &grad))?;
        }

        let train_regret = normalized_regret(
            &sample_regrets(&predictor, train_ds, &eval_oracle, &train_opt)?,
            &train_opt,
        )
        .0;
        let val_regret = normalized_regret(
            &sample_regrets(&predictor, val_ds, &eval_oracle, &val_opt)?,
            &val_opt,
        )
        .0;
        if !val_regret.is_finite() {
            return Err(Error::NonFinite {
                context: format!("validation regret in epoch {epoch}"),
            });
        }
        log::debug!("epoch {epoch}: train {train_regret:.4}% val {val_regret:.4}%");
        history.push(EpochRecord {
            epoch,
            train_regret_pct: train_regret,
            val_regret_pct: val_regret,
        });
        if val_regret < best.2 {
            best = (predictor.clone(), epoch, val_regret);
        }
    }

    Ok(TrainedModel {
        predictor: best.0,
        best_epoch: best.1,
        history,
        solves: SolveCounts {
            precompute: targets.precompute_solves,
            gradient: grad_oracle.solve_count(),
            evaluation: eval_oracle.solve_count(),
        },
        config: cfg.clone(),
    })
}
