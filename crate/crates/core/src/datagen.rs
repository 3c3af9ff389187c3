//! Synthetic shortest-path / TSP data with a polynomial feature→cost map.
//!
//! For a fixed binary mixing matrix `B` (`n × m`), each sample draws
//! `z ~ N(0, I_m)` and sets
//!
//! ```text
//! c_clean_i = (max((B z)_i / √m + 3, 0))^deg + 1
//! c_i       = c_clean_i · ε_i,   ε_i ~ U(1 − ε̄, 1 + ε̄)
//! ```
//!
//! so `E[c | z] = c_clean`. With `noise_shared` one `ε` multiplies the whole
//! vector instead of one per coefficient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::ProblemInstance;
use crate::rng::{streams, RngStream};
use crate::types::{CostVector, Dataset, DatasetMeta, FeatureVector, Sample};

pub use crate::io::{load_dataset, save_dataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub m: usize,
    pub deg: u32,
    pub noise_halfwidth: f64,
    pub t_train: usize,
    pub t_val: usize,
    pub t_test: usize,
    pub seed: u64,
    pub noise_shared: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            m: 5,
            deg: 6,
            noise_halfwidth: 0.5,
            t_train: 100,
            t_val: 100,
            t_test: 1000,
            seed: 0,
            noise_shared: false,
        }
    }
}

impl GenParams {
    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.deg == 0 {
            return Err(Error::InvalidParameter("need m >= 1 and deg >= 1".into()));
        }
        if !(self.noise_halfwidth >= 0.0 && self.noise_halfwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise half-width must be finite and >= 0, got {}",
                self.noise_halfwidth
            )));
        }
        Ok(())
    }
}

/// Mixing matrix shared by every split of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GenModel {
    /// Row-major `n × m`, entries in {0, 1}.
    pub b: Vec<u8>,
    pub n: usize,
    pub m: usize,
    pub instance: ProblemInstance,
}

pub fn make_gen_model(instance: &ProblemInstance, m: usize, seed: u64) -> GenModel {
    let n = instance.num_vars();
    let mut s = RngStream::new(seed, streams::GEN_MODEL);
    let b = (0..n * m).map(|_| u8::from(s.bernoulli(0.5))).collect();
    GenModel {
        b,
        n,
        m,
        instance: instance.clone(),
    }
}

/// Clean cost for features `z`.
pub fn clean_costs(gm: &GenModel, z: &[f64], deg: u32) -> CostVector {
    let scale = (gm.m as f64).sqrt();
    CostVector(
        gm.b.chunks_exact(gm.m)
            .map(|row| {
                let bz: f64 = row
                    .iter()
                    .zip(z)
                    .filter(|(&bij, _)| bij == 1)
                    .map(|(_, zj)| zj)
                    .sum();
                (bz / scale + 3.0).max(0.0).powi(deg as i32) + 1.0
            })
            .collect(),
    )
}

pub fn generate_samples(
    gm: &GenModel,
    count: usize,
    params: &GenParams,
    stream: &mut RngStream,
) -> Result<Dataset> {
    params.validate()?;
    if count == 0 {
        return Err(Error::EmptyDataset);
    }
    let eb = params.noise_halfwidth;
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let z: Vec<f64> = (0..gm.m).map(|_| stream.normal()).collect();
        let clean = clean_costs(gm, &z, params.deg);
        let c = if params.noise_shared {
            let eps = stream.uniform(1.0 - eb, 1.0 + eb);
            clean.0.iter().map(|v| v * eps).collect()
        } else {
            clean
                .0
                .iter()
                .map(|v| v * stream.uniform(1.0 - eb, 1.0 + eb))
                .collect()
        };
        samples.push(Sample {
            z: FeatureVector(z),
            c: CostVector(c),
            c_clean: Some(clean),
        });
    }
    let meta = DatasetMeta {
        problem: gm.instance.kind_name().into(),
        m: gm.m,
        n: gm.n,
        instance: gm.instance.to_string(),
        seed: stream.seed(),
        stream: stream.stream_id(),
        noise_halfwidth: eb,
        degree: params.deg,
        noise_shared: params.noise_shared,
        samples: count,
    };
    Dataset::new(samples, meta)
}

/// Node coordinates uniform in the unit square, rounded to 6 decimals so the
/// instance descriptor round-trips exactly.
pub fn random_tsp_instance(nodes: usize, seed: u64) -> Result<ProblemInstance> {
    let mut s = RngStream::new(seed, streams::TSP_COORDS);
    let round = |v: f64| (v * 1e6).round() / 1e6;
    let coords = (0..nodes)
        .map(|_| (round(s.unit()), round(s.unit())))
        .collect();
    ProblemInstance::tsp_with_coords(coords)
}

#[derive(Debug, Clone)]
pub struct Splits {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
    pub model: GenModel,
}

/// Train/val/test drawn from one mixing matrix on distinct streams.
pub fn generate_splits(instance: &ProblemInstance, params: &GenParams) -> Result<Splits> {
    params.validate()?;
    let model = make_gen_model(instance, params.m, params.seed);
    let draw = |count, id| {
        let mut s = RngStream::new(params.seed, id);
        generate_samples(&model, count, params, &mut s)
    };
    Ok(Splits {
        train: draw(params.t_train, streams::TRAIN_SAMPLES)?,
        val: draw(params.t_val, streams::VAL_SAMPLES)?,
        test: draw(params.t_test, streams::TEST_SAMPLES)?,
        model,
    })
}
