use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result};
use crate::types::{CostVector, FeatureVector};

/// `ĉ = θ z (+ b)` with `θ` stored row-major as `n × m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearPredictor {
    pub n: usize,
    pub m: usize,
    pub theta: Vec<f64>,
    pub bias: Option<Vec<f64>>,
}

impl LinearPredictor {
    pub fn zeros(n: usize, m: usize, use_bias: bool) -> Self {
        Self {
            n,
            m,
            theta: vec![0.0; n * m],
            bias: use_bias.then(|| vec![0.0; n]),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        Self {
            n,
            m,
            theta: rows.iter().flatten().copied().collect(),
            bias: None,
        }
    }

    pub fn predict(&self, z: &FeatureVector) -> Result<CostVector> {
        check_len("feature vector", self.m, z.len())?;
        let z = z.as_slice();
        let mut out: Vec<f64> = (0..self.n)
            .map(|r| {
                let row = &self.theta[r * self.m..(r + 1) * self.m];
                row.iter().zip(z).map(|(a, b)| a * b).sum()
            })
            .collect();
        if let Some(b) = &self.bias {
            for (o, bi) in out.iter_mut().zip(b) {
                *o += bi;
            }
        }
        Ok(CostVector(out))
    }

    pub fn num_params(&self) -> usize {
        self.theta.len() + self.bias.as_ref().map_or(0, Vec::len)
    }

    pub fn is_finite(&self) -> bool {
        self.theta
            .iter()
            .chain(self.bias.iter().flatten())
            .all(|v| v.is_finite())
    }

    /// Applies `f` to the flat parameter vector (θ followed by the bias).
    pub(crate) fn with_params<R>(&mut self, f: impl FnOnce(&mut [f64]) -> R) -> R {
        let mut flat = self.theta.clone();
        if let Some(b) = &self.bias {
            flat.extend_from_slice(b);
        }
        let r = f(&mut flat);
        let (t, b) = flat.split_at(self.theta.len());
        self.theta.copy_from_slice(t);
        if let Some(bias) = &mut self.bias {
            bias.copy_from_slice(b);
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_zero_and_mixed() {
        let id = LinearPredictor::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(
            id.predict(&vec![3.0, 4.0].into()).unwrap().0,
            vec![3.0, 4.0]
        );
        let zero = LinearPredictor::zeros(3, 2, false);
        assert_eq!(
            zero.predict(&vec![3.0, 4.0].into()).unwrap().0,
            vec![0.0; 3]
        );
        let p = LinearPredictor::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
        assert_eq!(p.predict(&vec![2.0, 1.0].into()).unwrap().0, vec![3.0, 1.0]);
    }

    #[test]
    fn bias_and_mismatch() {
        let mut p = LinearPredictor::zeros(2, 1, true);
        p.bias = Some(vec![1.0, -1.0]);
        assert_eq!(p.predict(&vec![5.0].into()).unwrap().0, vec![1.0, -1.0]);
        assert!(p.predict(&vec![1.0, 2.0].into()).is_err());
        assert_eq!(p.num_params(), 4);
    }
}
