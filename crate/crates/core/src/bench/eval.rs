//! Normalized regret: `100 · Σ_i regret_i / (Σ_i |c_i^T x*(c_i)| + 1e-12)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learning::LinearPredictor;
use crate::oracles::Oracle;
use crate::types::{dot, CostVector, Dataset, Decision, FeatureVector};

pub const DENOMINATOR_GUARD: f64 = 1e-12;

/// Anything mapping features to a cost prediction.
pub trait CostPredictor {
    fn predict_costs(&self, z: &FeatureVector) -> Result<CostVector>;
}

impl CostPredictor for LinearPredictor {
    fn predict_costs(&self, z: &FeatureVector) -> Result<CostVector> {
        self.predict(z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub split: String,
    pub model: String,
    pub per_sample: Vec<f64>,
    pub normalized_regret_pct: f64,
    /// Set when every optimal objective on the split is zero and the
    /// percentage is only bounded by the guard term.
    pub denominator_zero: bool,
    pub expected_normalized_regret_pct: Option<f64>,
}

/// `c_i^T x*(c_i)` for every sample.
pub fn optimal_objectives(ds: &Dataset, oracle: &Oracle) -> Result<Vec<f64>> {
    ds.samples
        .iter()
        .map(|s| dot(&s.c, &oracle.solve(&s.c)?))
        .collect()
}

/// `x*(ĉ_i)` for every sample.
pub fn predicted_decisions(
    model: &impl CostPredictor,
    ds: &Dataset,
    oracle: &Oracle,
) -> Result<Vec<Decision>> {
    ds.samples
        .iter()
        .map(|s| {
            let chat = model.predict_costs(&s.z)?;
            if !chat.is_finite() {
                return Err(Error::NonFinite {
                    context: "prediction during evaluation".into(),
                });
            }
            oracle.solve(&chat)
        })
        .collect()
}

/// Empirical regrets given precomputed optimal objectives.
pub fn sample_regrets(
    model: &impl CostPredictor,
    ds: &Dataset,
    oracle: &Oracle,
    optima: &[f64],
) -> Result<Vec<f64>> {
    predicted_decisions(model, ds, oracle)?
        .iter()
        .zip(&ds.samples)
        .zip(optima)
        .map(|((x, s), opt)| Ok(dot(&s.c, x)? - opt))
        .collect()
}

/// Returns the percentage and whether the denominator was zero.
pub fn normalized_regret(regrets: &[f64], optima: &[f64]) -> (f64, bool) {
    let num: f64 = regrets.iter().sum();
    let den: f64 = optima.iter().map(|v| v.abs()).sum();
    (100.0 * num / (den + DENOMINATOR_GUARD), den == 0.0)
}

fn expected_from_decisions(ds: &Dataset, decisions: &[Decision], oracle: &Oracle) -> Result<f64> {
    let mut regrets = Vec::with_capacity(ds.len());
    let mut optima = Vec::with_capacity(ds.len());
    for (s, x) in ds.samples.iter().zip(decisions) {
        let clean = s.c_clean.as_ref().ok_or(Error::MissingCleanCosts)?;
        let opt = dot(clean, &oracle.solve(clean)?)?;
        regrets.push(dot(clean, x)? - opt);
        optima.push(opt);
    }
    Ok(normalized_regret(&regrets, &optima).0)
}

/// Empirical regret on `ds`; also fills the expected regret when the dataset
/// carries clean costs.
pub fn eval_regret(
    model: &impl CostPredictor,
    ds: &Dataset,
    oracle: &Oracle,
) -> Result<RegretReport> {
    let decisions = predicted_decisions(model, ds, oracle)?;
    let optima = optimal_objectives(ds, oracle)?;
    let per_sample = decisions
        .iter()
        .zip(&ds.samples)
        .zip(&optima)
        .map(|((x, s), opt)| Ok(dot(&s.c, x)? - opt))
        .collect::<Result<Vec<f64>>>()?;
    let (pct, zero) = normalized_regret(&per_sample, &optima);
    let expected = if ds.has_clean_costs() {
        Some(expected_from_decisions(ds, &decisions, oracle)?)
    } else {
        None
    };
    Ok(RegretReport {
        split: String::new(),
        model: String::new(),
        per_sample,
        normalized_regret_pct: pct,
        denominator_zero: zero,
        expected_normalized_regret_pct: expected,
    })
}

/// Normalized regret measured against the clean (conditional-mean) costs.
pub fn eval_expected_regret(
    model: &impl CostPredictor,
    ds: &Dataset,
    oracle: &Oracle,
) -> Result<f64> {
    if !ds.has_clean_costs() {
        return Err(Error::MissingCleanCosts);
    }
    let decisions = predicted_decisions(model, ds, oracle)?;
    expected_from_decisions(ds, &decisions, oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::ProblemInstance;
    use crate::types::{DatasetMeta, Sample};

    struct Fixed(CostVector);

    impl CostPredictor for Fixed {
        fn predict_costs(&self, _: &FeatureVector) -> Result<CostVector> {
            Ok(self.0.clone())
        }
    }

    fn ds(costs: &[Vec<f64>], inst: &str) -> Dataset {
        let n = costs[0].len();
        let samples = costs
            .iter()
            .map(|c| Sample {
                z: vec![0.0].into(),
                c: c.clone().into(),
                c_clean: None,
            })
            .collect();
        Dataset::new(
            samples,
            DatasetMeta {
                problem: "x".into(),
                m: 1,
                n,
                instance: inst.into(),
                seed: 0,
                stream: 0,
                noise_halfwidth: 0.0,
                degree: 1,
                noise_shared: false,
                samples: 0,
            },
        )
        .unwrap()
    }

    #[test]
    fn grid_single_sample() {
        let o = Oracle::new(ProblemInstance::grid(2, 2).unwrap());
        let d = ds(&[vec![1.0, 5.0, 1.0, 1.0]], "grid:2x2");
        let r = eval_regret(&Fixed(vec![5.0, 1.0, 1.0, 1.0].into()), &d, &o).unwrap();
        assert_eq!(r.per_sample, vec![4.0]);
        assert!((r.normalized_regret_pct - 200.0).abs() < 1e-9);
        assert!(!r.denominator_zero);
        assert_eq!(r.expected_normalized_regret_pct, None);
        let perfect = eval_regret(&Fixed(vec![1.0, 5.0, 1.0, 1.0].into()), &d, &o).unwrap();
        assert_eq!(perfect.normalized_regret_pct, 0.0);
    }

    #[test]
    fn zero_denominator_is_flagged() {
        let o = Oracle::new(ProblemInstance::select(2).unwrap());
        let d = ds(&[vec![0.0, 1.0], vec![0.0, 1.0]], "select:2");
        let r = eval_regret(&Fixed(vec![1.0, 0.0].into()), &d, &o).unwrap();
        assert_eq!(r.per_sample, vec![1.0, 1.0]);
        assert!(r.denominator_zero);
        assert!(r.normalized_regret_pct > 1e12);
    }

    #[test]
    fn expected_regret_needs_clean_costs() {
        let o = Oracle::new(ProblemInstance::select(2).unwrap());
        let d = ds(&[vec![0.0, 1.0]], "select:2");
        assert!(matches!(
            eval_expected_regret(&Fixed(vec![1.0, 0.0].into()), &d, &o),
            Err(Error::MissingCleanCosts)
        ));
    }
}
