use nalgebra::{DMatrix, DVector};
use ndarray::ArrayView2;

use super::Regressor;
use crate::error::{Error, Result};

/// Ridge term added to the normal equations.
pub const RIDGE: f64 = 1e-8;

/// Multiple linear regression `y ≈ w·x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

/// Least squares on centered data with a tiny ridge so rank-deficient
/// designs still give a finite solution.
pub fn fit_linear_regression(x: ArrayView2<f64>, y: &[f64]) -> Result<LinearModel> {
    let (rows, cols) = x.dim();
    if rows == 0 || y.is_empty() {
        return Err(Error::EmptyInput("linear regression"));
    }
    if rows != y.len() {
        return Err(Error::Shape {
            expected: format!("{rows} targets"),
            found: y.len().to_string(),
        });
    }
    let x_mean: Vec<f64> = (0..cols).map(|j| x.column(j).sum() / rows as f64).collect();
    let y_mean = y.iter().sum::<f64>() / rows as f64;
    let centered = DMatrix::from_fn(rows, cols, |i, j| x[[i, j]] - x_mean[j]);
    let yc = DVector::from_iterator(rows, y.iter().map(|v| v - y_mean));

    let mut gram = centered.transpose() * &centered;
    for j in 0..cols {
        gram[(j, j)] += RIDGE;
    }
    let rhs = centered.transpose() * yc;
    let w = match gram.clone().cholesky() {
        Some(chol) => chol.solve(&rhs),
        None => gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Inconsistent("singular normal equations".into()))?,
    };
    let weights: Vec<f64> = w.iter().copied().collect();
    let bias = y_mean - weights.iter().zip(&x_mean).map(|(a, b)| a * b).sum::<f64>();
    if !bias.is_finite() || weights.iter().any(|v| !v.is_finite()) {
        return Err(Error::Inconsistent("non-finite regression coefficients".into()));
    }
    Ok(LinearModel { weights, bias })
}

impl Regressor for LinearModel {
    fn predict(&self, inputs: ArrayView2<f64>) -> Result<Vec<f64>> {
        if inputs.ncols() != self.weights.len() {
            return Err(Error::Shape {
                expected: format!("{} features", self.weights.len()),
                found: inputs.ncols().to_string(),
            });
        }
        Ok(inputs
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>() + self.bias)
            .collect())
    }
}
