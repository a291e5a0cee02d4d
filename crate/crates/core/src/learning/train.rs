//! Minibatch training loop with a held-out validation slice.

use ndarray::{ArrayView2, Axis};

use super::network::{log_cosh, nn_init, InputTransform, NetworkConfig, NeuralNet};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

// stream indices under the config seed; 0 is taken by initialization
const SPLIT_STREAM: u64 = 1;
const EPOCH_STREAM_BASE: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    /// `None` when the validation slice is empty.
    pub val_loss: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingCurve {
    pub epochs: Vec<EpochRecord>,
}

/// Seeded permutation of `0..rows` cut into `(train, validation)`; the
/// validation slice holds `round(rows · fraction)` rows but never all of them.
pub fn validation_split(rows: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..rows).collect();
    SplitMix64::stream(seed, SPLIT_STREAM).shuffle(&mut order);
    let n_val = ((rows as f64 * fraction).round() as usize).min(rows.saturating_sub(1));
    let val = order.split_off(rows - n_val);
    (order, val)
}

fn mean_log_cosh(pred: &[f64], labels: &[f64]) -> f64 {
    pred.iter().zip(labels).map(|(p, y)| log_cosh(p - y)).sum::<f64>() / labels.len() as f64
}

/// Trains a freshly initialized network. `on_epoch` sees every record as
/// soon as the epoch finishes. The result is a pure function of the
/// arguments.
pub fn train_network(
    config: &NetworkConfig,
    inputs: ArrayView2<f64>,
    labels: &[f64],
    transform: Option<InputTransform>,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<(NeuralNet, TrainingCurve)> {
    if inputs.nrows() == 0 {
        return Err(Error::EmptyInput("training set"));
    }
    if labels.len() != inputs.nrows() {
        return Err(Error::Shape {
            expected: format!("{} labels", inputs.nrows()),
            found: labels.len().to_string(),
        });
    }
    if labels.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidArgument("labels must be finite".into()));
    }
    let (mut net, mut adam) = nn_init(config)?;
    if inputs.ncols() != config.input_len() {
        return Err(Error::Shape {
            expected: format!("{} input columns", config.input_len()),
            found: inputs.ncols().to_string(),
        });
    }
    if let Some(t) = transform {
        if t.offset.len() != config.input_len() || t.scale.len() != config.input_len() {
            return Err(Error::Shape {
                expected: format!("{} transform entries", config.input_len()),
                found: format!("{} offsets, {} scales", t.offset.len(), t.scale.len()),
            });
        }
        net.transform = t;
    }

    let (mut train_idx, val_idx) = validation_split(inputs.nrows(), config.validation_fraction, config.seed);
    let val_x = inputs.select(Axis(0), &val_idx);
    let val_y: Vec<f64> = val_idx.iter().map(|&i| labels[i]).collect();

    let mut curve = TrainingCurve::default();
    for epoch in 1..=config.epochs {
        let stream = EPOCH_STREAM_BASE + 2 * (epoch as u64 - 1);
        SplitMix64::stream(config.seed, stream).shuffle(&mut train_idx);
        let mut dropout = SplitMix64::stream(config.seed, stream + 1);
        let mut total = 0.0;
        for chunk in train_idx.chunks(config.batch_size) {
            let x = inputs.select(Axis(0), chunk);
            let y: Vec<f64> = chunk.iter().map(|&i| labels[i]).collect();
            let (loss, grads) = net.loss_and_gradient(x.view(), &y, &mut dropout)?;
            adam.step(&mut net.params, &grads.0, config.learning_rate)?;
            total += loss * chunk.len() as f64;
        }
        let val_loss = if val_idx.is_empty() {
            None
        } else {
            let pred = net.forward_batch(val_x.view(), None)?;
            Some(mean_log_cosh(&pred, &val_y))
        };
        let record = EpochRecord {
            epoch,
            train_loss: total / train_idx.len() as f64,
            val_loss,
        };
        on_epoch(&record);
        curve.epochs.push(record);
    }
    Ok((net, curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn planted(rows: usize, seed: u64) -> (Array2<f64>, Vec<f64>) {
        let mut rng = SplitMix64::new(seed);
        let x = Array2::from_shape_simple_fn((rows, 6), || rng.below(5) as f64);
        let w = [0.5, -1.0, 0.25, 2.0, 0.0, 1.0];
        let y = x
            .rows()
            .into_iter()
            .map(|r| 3.0 + r.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        (x, y)
    }

    fn small_config(seed: u64, epochs: usize) -> NetworkConfig {
        NetworkConfig {
            conv_filters: 8,
            dense: vec![32, 32],
            dropout_rate: 0.0,
            batch_size: 16,
            epochs,
            seed,
            ..NetworkConfig::new(2, 3)
        }
    }

    #[test]
    fn split_sizes_and_partition() {
        let (train, val) = validation_split(100, 0.1, 7);
        assert_eq!((train.len(), val.len()), (90, 10));
        let mut all: Vec<usize> = train.iter().chain(&val).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert_eq!(validation_split(100, 0.1, 7), (train, val));
        assert_eq!(validation_split(1, 0.5, 7).1.len(), 0);
        assert_eq!(validation_split(10, 0.0, 7).1.len(), 0);
    }

    #[test]
    fn learns_a_planted_linear_target() {
        let (x, y) = planted(400, 3);
        let transform = InputTransform::standardize(x.view());
        let mut seen = 0;
        let (net, curve) =
            train_network(&small_config(11, 30), x.view(), &y, Some(transform), |_| seen += 1).unwrap();
        assert_eq!(seen, 30);
        let first = curve.epochs[0].train_loss;
        let last = curve.epochs.last().unwrap().train_loss;
        assert!(last < 0.1 * first, "loss {first} -> {last}");
        assert!(curve.epochs.iter().all(|r| r.val_loss.is_some()));
        use crate::learning::{metrics::r_squared, Regressor};
        let pred = net.predict(x.view()).unwrap();
        assert!(r_squared(&pred, &y).unwrap() > 0.9);
    }

    #[test]
    fn training_is_deterministic() {
        let (x, y) = planted(60, 4);
        let mut config = small_config(5, 3);
        config.dropout_rate = 0.5;
        let a = train_network(&config, x.view(), &y, None, |_| {}).unwrap();
        let b = train_network(&config, x.view(), &y, None, |_| {}).unwrap();
        assert_eq!(a, b);
        config.seed = 6;
        let c = train_network(&config, x.view(), &y, None, |_| {}).unwrap();
        assert_ne!(a.0.params, c.0.params);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (x, y) = planted(10, 5);
        let config = small_config(1, 1);
        assert!(train_network(&config, x.view(), &y[..9], None, |_| {}).is_err());
        let wide = Array2::<f64>::zeros((10, 7));
        assert!(matches!(
            train_network(&config, wide.view(), &y, None, |_| {}),
            Err(Error::Shape { .. })
        ));
        let empty = Array2::<f64>::zeros((0, 6));
        assert!(train_network(&config, empty.view(), &[], None, |_| {}).is_err());
    }
}
