use ndarray::ArrayView2;

use super::Regressor;
use crate::error::{Error, Result};

/// Coefficient of determination `1 − SS_res / SS_tot`.
pub fn r_squared(pred: &[f64], actual: &[f64]) -> Result<f64> {
    if pred.len() != actual.len() {
        return Err(Error::Shape {
            expected: format!("{} predictions", actual.len()),
            found: format!("{}", pred.len()),
        });
    }
    if actual.len() < 2 {
        return Err(Error::EmptyInput("r-squared needs at least two observations"));
    }
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedVariance);
    }
    let ss_res: f64 = pred.iter().zip(actual).map(|(p, a)| (a - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalReport {
    pub r_squared: f64,
    /// Fraction of predictions strictly above the true value.
    pub overshoot_rate: f64,
    /// Fraction of rounded predictions equal to the (integral) label.
    pub accuracy: f64,
    pub samples: usize,
}

impl EvalReport {
    pub fn from_predictions(pred: &[f64], actual: &[f64]) -> Result<Self> {
        let r_squared = r_squared(pred, actual)?;
        let n = actual.len() as f64;
        let over = pred.iter().zip(actual).filter(|(p, a)| p > a).count() as f64;
        let hits = pred.iter().zip(actual).filter(|(p, a)| p.round() == **a).count() as f64;
        Ok(EvalReport {
            r_squared,
            overshoot_rate: over / n,
            accuracy: hits / n,
            samples: actual.len(),
        })
    }
}

pub fn evaluate(model: &dyn Regressor, inputs: ArrayView2<f64>, labels: &[f64]) -> Result<EvalReport> {
    if inputs.nrows() == 0 {
        return Err(Error::EmptyInput("evaluation set"));
    }
    let pred = model.predict(inputs)?;
    EvalReport::from_predictions(&pred, labels)
}
