//! Regressors for Gröbner-basis complexity targets and their evaluation.

use ndarray::ArrayView2;

use crate::error::Result;

pub mod adam;
pub mod bayes;
pub mod linear;
pub mod metrics;
pub mod network;
pub mod train;

pub use adam::{adam_step, AdamState};
pub use bayes::{naive_bayes_classifier, NaiveBayes};
pub use linear::{fit_linear_regression, LinearModel};
pub use metrics::{evaluate, r_squared, EvalReport};
pub use network::{
    nn_forward, nn_init, nn_loss_and_gradient, Gradients, InputTransform, NetworkConfig, NeuralNet,
};
pub use train::{train_network, validation_split, EpochRecord, TrainingCurve};

pub trait Regressor {
    /// One prediction per input row.
    fn predict(&self, inputs: ArrayView2<f64>) -> Result<Vec<f64>>;
}

/// Predicts the same value everywhere; with the training mean it is the
/// baseline every model should beat.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantModel {
    pub value: f64,
}

impl ConstantModel {
    pub fn mean_of(labels: &[f64]) -> Result<Self> {
        if labels.is_empty() {
            return Err(crate::Error::EmptyInput("labels"));
        }
        Ok(ConstantModel {
            value: labels.iter().sum::<f64>() / labels.len() as f64,
        })
    }
}

impl Regressor for ConstantModel {
    fn predict(&self, inputs: ArrayView2<f64>) -> Result<Vec<f64>> {
        Ok(vec![self.value; inputs.nrows()])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrainedModel {
    Network(NeuralNet),
    Linear(LinearModel),
    Mean(ConstantModel),
}

impl TrainedModel {
    pub fn kind(&self) -> &'static str {
        match self {
            TrainedModel::Network(_) => "nn",
            TrainedModel::Linear(_) => "linreg",
            TrainedModel::Mean(_) => "mean",
        }
    }
}

impl Regressor for TrainedModel {
    fn predict(&self, inputs: ArrayView2<f64>) -> Result<Vec<f64>> {
        match self {
            TrainedModel::Network(m) => m.predict(inputs),
            TrainedModel::Linear(m) => m.predict(inputs),
            TrainedModel::Mean(m) => m.predict(inputs),
        }
    }
}
