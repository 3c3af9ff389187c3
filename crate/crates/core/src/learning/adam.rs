use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Bias-corrected Adam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    m1: Vec<f64>,
    m2: Vec<f64>,
}

impl AdamState {
    pub fn new(num_params: usize, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m1: vec![0.0; num_params],
            m2: vec![0.0; num_params],
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        check_len("adam params", self.m1.len(), params.len())?;
        check_len("adam grads", self.m1.len(), grads.len())?;
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("gradient entry {i} at adam step {}", self.step + 1),
            });
        }
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        for (((p, g), m1), m2) in params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m1)
            .zip(&mut self.m2)
        {
            *m1 = self.beta1 * *m1 + (1.0 - self.beta1) * g;
            *m2 = self.beta2 * *m2 + (1.0 - self.beta2) * g * g;
            let m_hat = *m1 / bc1;
            let v_hat = *m2 / bc2;
            *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}
