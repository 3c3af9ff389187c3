//! Evaluation, significance testing, sweeps and the variance-bias demo.

pub mod bias;
pub mod eval;
pub mod stats;
pub mod sweep;

pub use bias::{bias_demo, BiasDemoConfig, BiasDemoReport};
pub use eval::{eval_expected_regret, eval_regret, CostPredictor, RegretReport};
pub use stats::{paired_t_test, TTestResult};
pub use sweep::{run_sweep, SweepConfig, SweepResults};
