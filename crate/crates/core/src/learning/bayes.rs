use std::collections::BTreeMap;

use ndarray::ArrayView2;

use crate::error::{Error, Result};

/// Multinomial naive Bayes over nonnegative count features with add-one
/// smoothing.
#[derive(Clone, Debug, PartialEq)]
pub struct NaiveBayes {
    classes: Vec<i64>,
    log_prior: Vec<f64>,
    /// `log_theta[c][j]`: smoothed log probability of feature `j` in class `c`.
    log_theta: Vec<Vec<f64>>,
}

impl NaiveBayes {
    pub fn fit(x: ArrayView2<f64>, y: &[i64]) -> Result<Self> {
        let (rows, cols) = x.dim();
        if rows == 0 {
            return Err(Error::EmptyInput("naive Bayes training set"));
        }
        if rows != y.len() {
            return Err(Error::Shape {
                expected: format!("{rows} labels"),
                found: y.len().to_string(),
            });
        }
        if x.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
            return Err(Error::InvalidArgument(
                "naive Bayes features must be nonnegative integers".into(),
            ));
        }
        let mut per_class: BTreeMap<i64, (usize, Vec<f64>)> = BTreeMap::new();
        for (row, &label) in x.rows().into_iter().zip(y) {
            let entry = per_class.entry(label).or_insert_with(|| (0, vec![0.0; cols]));
            entry.0 += 1;
            for (acc, v) in entry.1.iter_mut().zip(row) {
                *acc += v;
            }
        }
        let mut model = NaiveBayes {
            classes: Vec::new(),
            log_prior: Vec::new(),
            log_theta: Vec::new(),
        };
        for (label, (count, sums)) in per_class {
            let total: f64 = sums.iter().sum::<f64>() + cols as f64;
            model.classes.push(label);
            model.log_prior.push((count as f64 / rows as f64).ln());
            model
                .log_theta
                .push(sums.iter().map(|s| ((s + 1.0) / total).ln()).collect());
        }
        Ok(model)
    }

    pub fn classes(&self) -> &[i64] {
        &self.classes
    }

    /// Highest-scoring class; ties go to the smaller label.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<i64>> {
        let cols = self.log_theta[0].len();
        if x.ncols() != cols {
            return Err(Error::Shape {
                expected: format!("{cols} features"),
                found: x.ncols().to_string(),
            });
        }
        Ok(x.rows()
            .into_iter()
            .map(|row| {
                let mut best = (f64::NEG_INFINITY, self.classes[0]);
                for (c, &label) in self.classes.iter().enumerate() {
                    let score = self.log_prior[c]
                        + row.iter().zip(&self.log_theta[c]).map(|(v, t)| v * t).sum::<f64>();
                    if score > best.0 {
                        best = (score, label);
                    }
                }
                best.1
            })
            .collect())
    }
}

pub fn naive_bayes_classifier(
    train_x: ArrayView2<f64>,
    train_y: &[i64],
    test_x: ArrayView2<f64>,
) -> Result<Vec<i64>> {
    NaiveBayes::fit(train_x, train_y)?.predict(test_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use ndarray::Array2;

    #[test]
    fn single_class() {
        let x = Array2::from_shape_vec((3, 2), vec![1.0, 2.0, 0.0, 5.0, 3.0, 3.0]).unwrap();
        let test = Array2::from_shape_vec((2, 2), vec![9.0, 0.0, 0.0, 9.0]).unwrap();
        assert_eq!(naive_bayes_classifier(x.view(), &[4, 4, 4], test.view()).unwrap(), vec![4, 4]);
    }

    #[test]
    fn separated_profiles() {
        // class 0 favours feature 0, class 1 favours feature 2
        let mut rng = SplitMix64::new(99);
        let mut draw = |profile: [f64; 3]| -> Vec<f64> {
            let mut counts = vec![0.0; 3];
            for _ in 0..20 {
                let u = rng.unit_f64();
                let k = if u < profile[0] { 0 } else if u < profile[0] + profile[1] { 1 } else { 2 };
                counts[k] += 1.0;
            }
            counts
        };
        let profiles = [[0.7, 0.2, 0.1], [0.1, 0.2, 0.7]];
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..200 {
            rows.extend(draw(profiles[i % 2]));
            labels.push((i % 2) as i64);
        }
        let train = Array2::from_shape_vec((200, 3), rows).unwrap();
        let mut test_rows = Vec::new();
        let mut truth = Vec::new();
        for i in 0..50 {
            test_rows.extend(draw(profiles[i % 2]));
            truth.push((i % 2) as i64);
        }
        let test = Array2::from_shape_vec((50, 3), test_rows).unwrap();
        let pred = naive_bayes_classifier(train.view(), &labels, test.view()).unwrap();
        assert_eq!(pred, truth);
    }

    #[test]
    fn ties_go_to_smaller_label() {
        let x = Array2::from_shape_vec((4, 2), vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let test = Array2::from_shape_vec((1, 2), vec![3.0, 3.0]).unwrap();
        assert_eq!(naive_bayes_classifier(x.view(), &[9, 2, 9, 2], test.view()).unwrap(), vec![2]);
    }

    #[test]
    fn rejects_negative_features() {
        let x = Array2::from_shape_vec((1, 2), vec![-1.0, 1.0]).unwrap();
        assert!(NaiveBayes::fit(x.view(), &[0]).is_err());
    }
}
