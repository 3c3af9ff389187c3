//! Per-sample target `(cost, decision)` pairs for each target policy.
//!
//! Targets only depend on the training data, so they are computed once
//! before the first epoch and optionally cached on disk.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::oracles::{Oracle, UncertaintyParams};
use crate::types::{CostVector, Dataset, Decision};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_W: f64 = 0.5;
pub const DEFAULT_RHO: f64 = 0.5;
pub const DEFAULT_GAMMA_FRAC: f64 = 0.125;

/// Which decision(s) stand in for `x*(c)` in the regret's second term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetPolicy {
    Empirical,
    RobustOpt { uncertainty: UncertaintyParams },
    TopK { k: usize },
    Knn { k: usize, w: f64 },
}

impl TargetPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TargetPolicy::Empirical => Ok(()),
            TargetPolicy::RobustOpt { uncertainty } => uncertainty.validate(),
            TargetPolicy::TopK { k } if k >= 1 => Ok(()),
            TargetPolicy::Knn { k, w } if k >= 1 && (0.0..=1.0).contains(&w) => Ok(()),
            other => Err(Error::InvalidParameter(format!(
                "invalid target policy {other:?}"
            ))),
        }
    }

    /// Short label used in reports: `emp`, `ro`, `topk`, `knn`.
    pub fn label(&self) -> &'static str {
        match self {
            TargetPolicy::Empirical => "emp",
            TargetPolicy::RobustOpt { .. } => "ro",
            TargetPolicy::TopK { .. } => "topk",
            TargetPolicy::Knn { .. } => "knn",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub cost: CostVector,
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSet {
    pub policy: TargetPolicy,
    pub per_sample: Vec<Vec<Target>>,
    /// Nominal solves spent building the set.
    pub precompute_solves: u64,
}

impl TargetSet {
    pub fn len(&self) -> usize {
        self.per_sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_sample.is_empty()
    }
}

/// The `k` nearest other samples to sample `i` in Euclidean feature distance;
/// ties go to the smaller index.
pub fn knn_neighbors(ds: &Dataset, i: usize, k: usize) -> Result<Vec<usize>> {
    let t = ds.len();
    if i >= t {
        return Err(Error::InvalidParameter(format!(
            "sample {i} out of range (t = {t})"
        )));
    }
    if k == 0 || k >= t {
        return Err(Error::InvalidParameter(format!(
            "k-NN needs 1 <= k <= t - 1, got k = {k}, t = {t}"
        )));
    }
    let zi = &ds.samples[i].z;
    let mut d: Vec<(f64, usize)> = ds
        .samples
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(j, s)| (zi.squared_distance(&s.z), j))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(d.into_iter().take(k).map(|(_, j)| j).collect())
}

/// `w · c_j + (1 − w) · c_i` for each neighbour `j` of sample `i`.
pub fn knn_target_costs(ds: &Dataset, i: usize, k: usize, w: f64) -> Result<Vec<CostVector>> {
    let ci = &ds.samples[i].c;
    Ok(knn_neighbors(ds, i, k)?
        .into_iter()
        .map(|j| ds.samples[j].c.combine(w, ci, 1.0 - w))
        .collect())
}

fn sample_targets(
    policy: &TargetPolicy,
    ds: &Dataset,
    i: usize,
    oracle: &Oracle,
) -> Result<Vec<Target>> {
    let c = &ds.samples[i].c;
    let single = |decision| {
        vec![Target {
            cost: c.clone(),
            decision,
        }]
    };
    Ok(match *policy {
        TargetPolicy::Empirical => single(oracle.solve(c)?),
        TargetPolicy::RobustOpt { uncertainty } => single(oracle.robust_solve(c, &uncertainty)?),
        TargetPolicy::TopK { k } => oracle
            .top_k(c, k)?
            .into_iter()
            .map(|decision| Target {
                cost: c.clone(),
                decision,
            })
            .collect(),
        TargetPolicy::Knn { k, w } => knn_target_costs(ds, i, k, w)?
            .into_iter()
            .map(|cost| {
                let decision = oracle.solve(&cost)?;
                Ok(Target { cost, decision })
            })
            .collect::<Result<Vec<_>>>()?,
    })
}

/// Computes targets for every sample in parallel; output order and content
/// do not depend on the number of worker threads.
pub fn build_targets(policy: &TargetPolicy, ds: &Dataset, oracle: &Oracle) -> Result<TargetSet> {
    policy.validate()?;
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let before = oracle.solve_count();
    let per_sample = (0..ds.len())
        .into_par_iter()
        .map(|i| sample_targets(policy, ds, i, oracle))
        .collect::<Result<Vec<_>>>()?;
    Ok(TargetSet {
        policy: *policy,
        per_sample,
        precompute_solves: oracle.solve_count() - before,
    })
}

/// SHA-256 over the instance descriptor and every feature/cost bit pattern.
pub fn dataset_hash(ds: &Dataset) -> String {
    let mut h = Sha256::new();
    h.update(ds.meta.instance.as_bytes());
    h.update((ds.meta.m as u64).to_le_bytes());
    h.update((ds.meta.n as u64).to_le_bytes());
    for s in &ds.samples {
        for v in s.z.as_slice().iter().chain(s.c.as_slice()) {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

#[derive(Serialize, Deserialize)]
struct CachedTargets {
    dataset_hash: String,
    targets: TargetSet,
}

/// Loads `path` when it was built from the same dataset and policy,
/// otherwise builds the targets and rewrites the cache file.
pub fn build_targets_cached(
    policy: &TargetPolicy,
    ds: &Dataset,
    oracle: &Oracle,
    path: &Path,
) -> Result<TargetSet> {
    let hash = dataset_hash(ds);
    if let Ok(text) = fs::read_to_string(path) {
        match serde_json::from_str::<CachedTargets>(&text) {
            Ok(c) if c.dataset_hash == hash && c.targets.policy == *policy => {
                log::info!("reusing cached targets from {}", path.display());
                return Ok(c.targets);
            }
            Ok(_) => log::info!("stale target cache at {}, rebuilding", path.display()),
            Err(e) => log::warn!("unreadable target cache {}: {e}", path.display()),
        }
    }
    let targets = build_targets(policy, ds, oracle)?;
    let cached = CachedTargets {
        dataset_hash: hash,
        targets,
    };
    fs::write(path, serde_json::to_string(&cached)?).map_err(|e| Error::io(path, e))?;
    Ok(cached.targets)
}
