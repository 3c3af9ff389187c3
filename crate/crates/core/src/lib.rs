//! Decision-focused learning for combinatorial problems with linear
//! objectives.
//!
//! A linear model predicts cost vectors from features; training pushes it
//! towards good downstream decisions using SPO+ or perturbed Fenchel–Young
//! gradients. The second term of the regret can be swapped for one of three
//! robust targets (budget-robust optimum, k best decisions, k-NN smoothed
//! costs) precomputed once before training.

pub mod bench;
pub mod datagen;
pub mod error;
pub mod io;
pub mod learning;
pub mod oracles;
pub mod rng;
pub mod targets;
pub mod types;

pub use error::{Error, Result};
pub use oracles::{Oracle, ProblemInstance, UncertaintyParams};
pub use types::{dot, CostVector, Dataset, DatasetMeta, Decision, FeatureVector, Sample};
