//! Vectors, decisions and datasets shared by every module.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::error::{check_len, Error, Result};

/// Context features `z` for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub Vec<f64>);

/// Objective coefficients `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CostVector(pub Vec<f64>);

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn squared_distance(&self, other: &FeatureVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

impl CostVector {
    pub fn zeros(n: usize) -> Self {
        CostVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// `a * self + b * other`, elementwise.
    pub fn combine(&self, a: f64, other: &CostVector, b: f64) -> CostVector {
        CostVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }
}

impl From<Vec<f64>> for CostVector {
    fn from(v: Vec<f64>) -> Self {
        CostVector(v)
    }
}

impl From<Vec<f64>> for FeatureVector {
    fn from(v: Vec<f64>) -> Self {
        FeatureVector(v)
    }
}

/// Binary incidence vector over an instance's variable ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Decision(pub Vec<bool>);

impl Decision {
    pub fn zeros(n: usize) -> Self {
        Decision(vec![false; n])
    }

    pub fn from_indices(n: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut d = Decision::zeros(n);
        for i in ones {
            d.0[i] = true;
        }
        d
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Decision(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// Tie-break order among equal-cost decisions. `Less` means `self` is
    /// preferred: the first differing variable is set in `self`, i.e. the
    /// sorted index set of `self` is lexicographically smaller.
    pub fn tie_cmp(&self, other: &Decision) -> Ordering {
        other.0.cmp(&self.0)
    }
}

/// `Σ c_i x_i`, summed in variable order.
pub fn dot(c: &CostVector, x: &Decision) -> Result<f64> {
    check_len("dot", c.len(), x.len())?;
    Ok(c.0
        .iter()
        .zip(&x.0)
        .filter(|(_, &b)| b)
        .map(|(v, _)| *v)
        .sum())
}

/// Total order used wherever candidate decisions are ranked: cost first,
/// then [`Decision::tie_cmp`].
pub fn rank_cmp(cost_a: f64, a: &Decision, cost_b: f64, b: &Decision) -> Ordering {
    cost_a
        .partial_cmp(&cost_b)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.tie_cmp(b))
}

/// One observation `(z, c)` plus the generator's noiseless cost when known.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub z: FeatureVector,
    pub c: CostVector,
    pub c_clean: Option<CostVector>,
}

/// Metadata stored alongside a dataset in `meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub problem: String,
    pub m: usize,
    pub n: usize,
    pub instance: String,
    pub seed: u64,
    pub stream: u64,
    pub noise_halfwidth: f64,
    pub degree: u32,
    #[serde(default)]
    pub noise_shared: bool,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub meta: DatasetMeta,
}

impl Dataset {
    /// Builds a dataset, checking every sample against `meta`.
    pub fn new(samples: Vec<Sample>, mut meta: DatasetMeta) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for s in &samples {
            check_len("feature vector", meta.m, s.z.len())?;
            check_len("cost vector", meta.n, s.c.len())?;
            if let Some(cc) = &s.c_clean {
                check_len("clean cost vector", meta.n, cc.len())?;
            }
            if !s.c.is_finite() || s.z.0.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    context: "dataset sample".into(),
                });
            }
        }
        meta.samples = samples.len();
        Ok(Self { samples, meta })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn has_clean_costs(&self) -> bool {
        self.samples.iter().all(|s| s.c_clean.is_some())
    }
}
