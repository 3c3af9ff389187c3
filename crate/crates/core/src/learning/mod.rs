//! Linear cost predictors trained with decision-focused gradients.

mod adam;
mod gradients;
mod predictor;
mod train;

pub use adam::AdamState;
pub use gradients::{
    loss_value, mean_target_cost, mean_target_decision, mse_gradient, pfyl_gradient,
    spo_plus_gradient,
};
pub use predictor::LinearPredictor;
pub use train::{train, EpochRecord, Method, TrainConfig, TrainedModel};
