//! Convolutional regressor: one 2-D convolution (single input channel,
//! stride 1, valid padding), a stack of dense layers and a linear scalar
//! output. ReLU and inverted dropout follow every hidden layer.
//!
//! Trainable tensors, in order: `conv.weight [F,1,kh,kw]`, `conv.bias [F]`,
//! `dense{k}.weight [out,in]`, `dense{k}.bias [out]`, `output.weight [1,in]`,
//! `output.bias [1]`. The flattened convolution output is position-major:
//! feature `p·F + f` is filter `f` at kernel position `p`.

use ndarray::{Array1, Array2, ArrayD, ArrayView2, Axis, IxDyn, Zip};
use rand_distr::{Distribution, Normal};

use super::adam::AdamState;
use super::Regressor;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkConfig {
    pub input_rows: usize,
    pub input_cols: usize,
    pub conv_filters: usize,
    pub kernel_rows: usize,
    pub kernel_cols: usize,
    pub dense: Vec<usize>,
    pub dropout_rate: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl NetworkConfig {
    /// The reference topology for an `rows × cols` exponent matrix: 300
    /// filters of 2×2, dense 500 and 500, dropout 0.5, Adam at 1e-3, batches
    /// of 128 for 100 epochs with a 10% validation split.
    pub fn new(input_rows: usize, input_cols: usize) -> Self {
        NetworkConfig {
            input_rows,
            input_cols,
            conv_filters: 300,
            kernel_rows: 2.min(input_rows),
            kernel_cols: 2.min(input_cols),
            dense: vec![500, 500],
            dropout_rate: 0.5,
            learning_rate: 1e-3,
            batch_size: 128,
            epochs: 100,
            validation_fraction: 0.10,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.input_rows == 0 || self.input_cols == 0 {
            return bad("input shape must be nonempty".into());
        }
        if self.kernel_rows == 0
            || self.kernel_cols == 0
            || self.kernel_rows > self.input_rows
            || self.kernel_cols > self.input_cols
        {
            return bad(format!(
                "kernel {}x{} does not fit input {}x{}",
                self.kernel_rows, self.kernel_cols, self.input_rows, self.input_cols
            ));
        }
        if self.conv_filters == 0 || self.dense.contains(&0) {
            return bad("layer widths must be positive".into());
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return bad(format!("dropout rate {} outside [0, 1)", self.dropout_rate));
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return bad("batch size and epochs must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return bad(format!(
                "validation fraction {} outside [0, 1)",
                self.validation_fraction
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate {} must be positive", self.learning_rate));
        }
        Ok(())
    }

    pub fn input_len(&self) -> usize {
        self.input_rows * self.input_cols
    }

    /// Number of kernel placements.
    pub fn conv_positions(&self) -> usize {
        (self.input_rows - self.kernel_rows + 1) * (self.input_cols - self.kernel_cols + 1)
    }

    pub fn conv_features(&self) -> usize {
        self.conv_positions() * self.conv_filters
    }

    pub fn param_names(&self) -> Vec<String> {
        let mut names = vec!["conv.weight".to_string(), "conv.bias".to_string()];
        for k in 0..self.dense.len() {
            names.push(format!("dense{}.weight", k + 1));
            names.push(format!("dense{}.bias", k + 1));
        }
        names.push("output.weight".into());
        names.push("output.bias".into());
        names
    }

    pub fn param_shapes(&self) -> Vec<Vec<usize>> {
        let f = self.conv_filters;
        let mut shapes = vec![vec![f, 1, self.kernel_rows, self.kernel_cols], vec![f]];
        let mut width = self.conv_features();
        for &d in &self.dense {
            shapes.push(vec![d, width]);
            shapes.push(vec![d]);
            width = d;
        }
        shapes.push(vec![1, width]);
        shapes.push(vec![1]);
        shapes
    }
}

/// Fixed affine input preprocessing `(x − offset) · scale`, per column.
#[derive(Clone, Debug, PartialEq)]
pub struct InputTransform {
    pub offset: Vec<f64>,
    pub scale: Vec<f64>,
}

impl InputTransform {
    pub fn identity(len: usize) -> Self {
        InputTransform {
            offset: vec![0.0; len],
            scale: vec![1.0; len],
        }
    }

    pub fn uniform_scale(len: usize, scale: f64) -> Self {
        InputTransform {
            offset: vec![0.0; len],
            scale: vec![scale; len],
        }
    }

    /// Per-column standardization from `x`; constant columns keep scale 1.
    pub fn standardize(x: ArrayView2<f64>) -> Self {
        let rows = x.nrows().max(1) as f64;
        let mut offset = Vec::with_capacity(x.ncols());
        let mut scale = Vec::with_capacity(x.ncols());
        for col in x.columns() {
            let mean = col.sum() / rows;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / rows;
            offset.push(mean);
            scale.push(if var > 0.0 { 1.0 / var.sqrt() } else { 1.0 });
        }
        InputTransform { offset, scale }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeuralNet {
    pub config: NetworkConfig,
    pub params: Vec<ArrayD<f64>>,
    pub transform: InputTransform,
}

/// Gradients in the same layout as [`NeuralNet::params`].
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients(pub Vec<ArrayD<f64>>);

struct HiddenCache {
    pre: Array2<f64>,
    /// Scaled keep mask; `None` when no dropout was applied.
    mask: Option<Array2<f64>>,
    act: Array2<f64>,
}

struct ForwardCache {
    patches: Array2<f64>,
    hidden: Vec<HiddenCache>,
    output: Array1<f64>,
}

/// He-initialized network (normal, std `sqrt(2 / fan_in)`) with zero biases,
/// plus a fresh optimizer state.
pub fn nn_init(config: &NetworkConfig) -> Result<(NeuralNet, AdamState)> {
    config.validate()?;
    let mut rng = SplitMix64::stream(config.seed, 0);
    let params: Vec<ArrayD<f64>> = config
        .param_shapes()
        .into_iter()
        .map(|shape| {
            if shape.len() == 1 {
                return ArrayD::zeros(IxDyn(&shape));
            }
            let fan_in: usize = shape[1..].iter().product();
            let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).expect("positive std");
            ArrayD::from_shape_simple_fn(IxDyn(&shape), || normal.sample(&mut rng))
        })
        .collect();
    let state = AdamState::new(&params);
    let net = NeuralNet {
        transform: InputTransform::identity(config.input_len()),
        config: config.clone(),
        params,
    };
    Ok((net, state))
}

fn relu_dropout(pre: Array2<f64>, keep: f64, rng: Option<&mut SplitMix64>) -> HiddenCache {
    let mut act = pre.mapv(|v| v.max(0.0));
    let mask = match rng {
        Some(rng) if keep < 1.0 => {
            let inv = 1.0 / keep;
            let mask = Array2::from_shape_simple_fn(pre.raw_dim(), || {
                if rng.unit_f64() < keep {
                    inv
                } else {
                    0.0
                }
            });
            act *= &mask;
            Some(mask)
        }
        _ => None,
    };
    HiddenCache { pre, mask, act }
}

/// Gradient through dropout and ReLU.
fn relu_dropout_back(grad: &mut Array2<f64>, cache: &HiddenCache) {
    match &cache.mask {
        Some(mask) => Zip::from(grad).and(&cache.pre).and(mask).for_each(|g, &z, &m| {
            *g = if z > 0.0 { *g * m } else { 0.0 };
        }),
        None => Zip::from(grad).and(&cache.pre).for_each(|g, &z| {
            if z <= 0.0 {
                *g = 0.0;
            }
        }),
    }
}

/// Numerically stable `ln cosh r`.
pub fn log_cosh(r: f64) -> f64 {
    let a = r.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

impl NeuralNet {
    fn view2(&self, idx: usize) -> ArrayView2<'_, f64> {
        let t = &self.params[idx];
        let rows = t.shape()[0];
        let cols = t.len() / rows;
        t.view()
            .into_shape_with_order((rows, cols))
            .expect("contiguous parameter tensor")
    }

    fn bias(&self, idx: usize) -> ArrayView2<'_, f64> {
        let t = &self.params[idx];
        t.view()
            .into_shape_with_order((1, t.len()))
            .expect("contiguous bias")
    }

    fn check_input(&self, x: ArrayView2<f64>) -> Result<()> {
        let len = self.config.input_len();
        if x.ncols() != len {
            return Err(Error::Shape {
                expected: format!(
                    "{}x{} = {len} input values",
                    self.config.input_rows, self.config.input_cols
                ),
                found: x.ncols().to_string(),
            });
        }
        Ok(())
    }

    fn prepare(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut out = x.to_owned();
        for (mut col, (o, s)) in out
            .columns_mut()
            .into_iter()
            .zip(self.transform.offset.iter().zip(&self.transform.scale))
        {
            col.mapv_inplace(|v| (v - o) * s);
        }
        out
    }

    fn im2col(&self, x: &Array2<f64>) -> Array2<f64> {
        let c = &self.config;
        let out_r = c.input_rows - c.kernel_rows + 1;
        let out_c = c.input_cols - c.kernel_cols + 1;
        let positions = out_r * out_c;
        let kk = c.kernel_rows * c.kernel_cols;
        let mut patches = Array2::zeros((x.nrows() * positions, kk));
        for (b, sample) in x.rows().into_iter().enumerate() {
            for i in 0..out_r {
                for j in 0..out_c {
                    let mut row = patches.row_mut(b * positions + i * out_c + j);
                    for di in 0..c.kernel_rows {
                        for dj in 0..c.kernel_cols {
                            row[di * c.kernel_cols + dj] = sample[(i + di) * c.input_cols + j + dj];
                        }
                    }
                }
            }
        }
        patches
    }

    fn forward_cached(&self, x: &Array2<f64>, mut rng: Option<&mut SplitMix64>) -> ForwardCache {
        let batch = x.nrows();
        let keep = 1.0 - self.config.dropout_rate;
        let patches = self.im2col(x);
        let conv = patches.dot(&self.view2(0).t()) + self.bias(1);
        let conv = conv
            .into_shape_with_order((batch, self.config.conv_features()))
            .expect("standard layout");
        let mut hidden = vec![relu_dropout(conv, keep, rng.as_deref_mut())];
        for k in 0..self.config.dense.len() {
            let w = self.view2(2 + 2 * k);
            let pre = hidden[k].act.dot(&w.t()) + self.bias(3 + 2 * k);
            hidden.push(relu_dropout(pre, keep, rng.as_deref_mut()));
        }
        let out_idx = self.params.len() - 2;
        let out = hidden.last().unwrap().act.dot(&self.view2(out_idx).t()) + self.bias(out_idx + 1);
        ForwardCache {
            patches,
            hidden,
            output: out.column(0).to_owned(),
        }
    }

    /// Predictions for a batch; `rng` switches on training-mode dropout.
    pub fn forward_batch(&self, x: ArrayView2<f64>, rng: Option<&mut SplitMix64>) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let prepared = self.prepare(x);
        Ok(self.forward_cached(&prepared, rng).output.to_vec())
    }

    /// Mean log-cosh loss over the batch and its gradient. Dropout masks are
    /// drawn from `rng` once per batch element and reused by backprop.
    pub fn loss_and_gradient(
        &self,
        x: ArrayView2<f64>,
        targets: &[f64],
        rng: &mut SplitMix64,
    ) -> Result<(f64, Gradients)> {
        self.check_input(x)?;
        let batch = x.nrows();
        if batch == 0 {
            return Err(Error::EmptyInput("training batch"));
        }
        if targets.len() != batch {
            return Err(Error::Shape {
                expected: format!("{batch} targets"),
                found: targets.len().to_string(),
            });
        }
        let prepared = self.prepare(x);
        let cache = self.forward_cached(&prepared, Some(rng));
        let residual: Vec<f64> = cache.output.iter().zip(targets).map(|(p, t)| p - t).collect();
        let loss = residual.iter().map(|&r| log_cosh(r)).sum::<f64>() / batch as f64;
        let d_out = Array2::from_shape_fn((batch, 1), |(b, _)| residual[b].tanh() / batch as f64);
        Ok((loss, self.backward(&cache, d_out)))
    }

    fn backward(&self, cache: &ForwardCache, d_out: Array2<f64>) -> Gradients {
        let n = self.params.len();
        let mut grads: Vec<ArrayD<f64>> = Vec::with_capacity(n);
        grads.resize_with(n, || ArrayD::zeros(IxDyn(&[0])));
        let shaped = |a: Array2<f64>, like: &ArrayD<f64>| -> ArrayD<f64> {
            a.into_shape_with_order(IxDyn(like.shape())).expect("gradient shape")
        };

        let out_idx = n - 2;
        let last = &cache.hidden.last().unwrap().act;
        grads[out_idx] = shaped(d_out.t().dot(last), &self.params[out_idx]);
        grads[out_idx + 1] = d_out.sum_axis(Axis(0)).into_dyn();
        let mut upstream = d_out.dot(&self.view2(out_idx));

        for k in (0..self.config.dense.len()).rev() {
            relu_dropout_back(&mut upstream, &cache.hidden[k + 1]);
            let w_idx = 2 + 2 * k;
            grads[w_idx] = shaped(upstream.t().dot(&cache.hidden[k].act), &self.params[w_idx]);
            grads[w_idx + 1] = upstream.sum_axis(Axis(0)).into_dyn();
            upstream = upstream.dot(&self.view2(w_idx));
        }

        relu_dropout_back(&mut upstream, &cache.hidden[0]);
        let per_position = upstream
            .into_shape_with_order((cache.patches.nrows(), self.config.conv_filters))
            .expect("standard layout");
        grads[0] = shaped(per_position.t().dot(&cache.patches), &self.params[0]);
        grads[1] = per_position.sum_axis(Axis(0)).into_dyn();
        Gradients(grads)
    }
}

/// Single-sample forward pass; `training` applies dropout drawn from `rng`.
pub fn nn_forward(net: &NeuralNet, x: &[f64], training: bool, rng: &mut SplitMix64) -> Result<f64> {
    let view = ArrayView2::from_shape((1, x.len()), x).expect("row vector");
    let out = net.forward_batch(view, training.then_some(rng))?;
    Ok(out[0])
}

pub fn nn_loss_and_gradient(
    net: &NeuralNet,
    inputs: ArrayView2<f64>,
    targets: &[f64],
    rng: &mut SplitMix64,
) -> Result<(f64, Gradients)> {
    net.loss_and_gradient(inputs, targets, rng)
}

impl Regressor for NeuralNet {
    fn predict(&self, inputs: ArrayView2<f64>) -> Result<Vec<f64>> {
        self.check_input(inputs)?;
        let mut out = Vec::with_capacity(inputs.nrows());
        for chunk in inputs.axis_chunks_iter(Axis(0), 512) {
            out.extend(self.forward_batch(chunk, None)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(dropout: f64, seed: u64) -> NeuralNet {
        let config = NetworkConfig {
            conv_filters: 2,
            dense: vec![8, 8],
            dropout_rate: dropout,
            seed,
            ..NetworkConfig::new(3, 4)
        };
        let (mut net, _) = nn_init(&config).unwrap();
        // nonzero biases so their gradients are exercised away from zero
        let mut rng = SplitMix64::new(seed ^ 0xB1A5);
        for p in net.params.iter_mut().filter(|p| p.ndim() == 1) {
            p.mapv_inplace(|_| rng.unit_f64() * 0.2 - 0.1);
        }
        net
    }

    fn batch(rows: usize, len: usize, seed: u64) -> (Array2<f64>, Vec<f64>) {
        let mut rng = SplitMix64::new(seed);
        let x = Array2::from_shape_simple_fn((rows, len), || rng.unit_f64() * 2.0 - 0.5);
        let y = (0..rows).map(|_| rng.unit_f64() * 3.0 - 1.0).collect();
        (x, y)
    }

    #[test]
    fn reference_shapes() {
        let config = NetworkConfig::new(5, 10);
        let (net, adam) = nn_init(&config).unwrap();
        let shapes: Vec<&[usize]> = net.params.iter().map(|p| p.shape()).collect();
        assert_eq!(
            shapes,
            vec![
                &[300, 1, 2, 2][..],
                &[300],
                &[500, 4 * 9 * 300],
                &[500],
                &[500, 500],
                &[500],
                &[1, 500],
                &[1]
            ]
        );
        assert_eq!(adam.t, 0);
        assert_eq!(config.param_names()[2], "dense1.weight");
    }

    #[test]
    fn init_is_seeded() {
        let a = tiny(0.5, 1);
        assert_eq!(a, tiny(0.5, 1));
        assert_ne!(a.params[0], tiny(0.5, 2).params[0]);
    }

    #[test]
    fn zero_parameters_give_zero_output() {
        let mut net = tiny(0.0, 3);
        for p in &mut net.params {
            p.fill(0.0);
        }
        let (x, _) = batch(4, 12, 5);
        let mut rng = SplitMix64::new(0);
        assert!(net.forward_batch(x.view(), Some(&mut rng)).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn inference_is_deterministic_and_dropout_free() {
        let net = tiny(0.0, 4);
        let (x, _) = batch(1, 12, 6);
        let row = x.row(0).to_vec();
        let mut rng = SplitMix64::new(9);
        let a = nn_forward(&net, &row, false, &mut rng).unwrap();
        assert_eq!(a, nn_forward(&net, &row, false, &mut rng).unwrap());
        assert_eq!(a, nn_forward(&net, &row, true, &mut rng).unwrap());

        let dropped = tiny(0.5, 4);
        assert_eq!(
            nn_forward(&dropped, &row, false, &mut rng).unwrap(),
            nn_forward(&dropped, &row, false, &mut rng).unwrap()
        );
        assert!(nn_forward(&net, &row[..5], false, &mut rng).is_err());
    }

    #[test]
    fn perfect_prediction_has_zero_loss_and_output_gradient() {
        let net = tiny(0.0, 5);
        let (x, _) = batch(6, 12, 7);
        let y = net.forward_batch(x.view(), None).unwrap();
        let (loss, grads) = net.loss_and_gradient(x.view(), &y, &mut SplitMix64::new(1)).unwrap();
        assert_eq!(loss, 0.0);
        let n = grads.0.len();
        assert!(grads.0[n - 1].iter().all(|&g| g == 0.0));
        assert!(grads.0[n - 2].iter().all(|&g| g == 0.0));
    }

    #[test]
    fn output_gradient_is_tanh_of_residual() {
        let net = tiny(0.0, 6);
        let (x, _) = batch(1, 12, 8);
        let pred = net.forward_batch(x.view(), None).unwrap()[0];
        for r in [-5.0, -0.3, 0.7, 12.0] {
            let (_, g) = net.loss_and_gradient(x.view(), &[pred - r], &mut SplitMix64::new(0)).unwrap();
            let bias_grad = g.0.last().unwrap()[0];
            assert!((bias_grad - f64::tanh(r)).abs() < 1e-12);
            assert!(bias_grad.abs() < 1.0);
        }
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
    }

    fn check_gradients(net: &NeuralNet, x: &Array2<f64>, y: &[f64], rng_seed: u64) -> f64 {
        let (_, grads) = net.loss_and_gradient(x.view(), y, &mut SplitMix64::new(rng_seed)).unwrap();
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for (t, g) in grads.0.iter().enumerate() {
            for i in 0..g.len() {
                let mut plus = net.clone();
                plus.params[t].as_slice_mut().unwrap()[i] += h;
                let mut minus = net.clone();
                minus.params[t].as_slice_mut().unwrap()[i] -= h;
                let lp = plus.loss_and_gradient(x.view(), y, &mut SplitMix64::new(rng_seed)).unwrap().0;
                let lm = minus.loss_and_gradient(x.view(), y, &mut SplitMix64::new(rng_seed)).unwrap().0;
                let numeric = (lp - lm) / (2.0 * h);
                worst = worst.max(rel_err(g.as_slice().unwrap()[i], numeric));
            }
        }
        worst
    }

    #[test]
    fn gradients_match_finite_differences() {
        let net = tiny(0.0, 21);
        let (x, y) = batch(5, 12, 22);
        let worst = check_gradients(&net, &x, &y, 0);
        assert!(worst < 1e-4, "worst relative error {worst}");
    }

    #[test]
    fn gradients_match_with_fixed_dropout_masks() {
        let net = tiny(0.5, 23);
        let (x, y) = batch(4, 12, 24);
        let worst = check_gradients(&net, &x, &y, 77);
        assert!(worst < 1e-4, "worst relative error {worst}");
    }

    #[test]
    fn inverted_dropout_preserves_expectation() {
        let config = NetworkConfig {
            conv_filters: 3,
            dense: vec![4],
            dropout_rate: 0.5,
            seed: 8,
            ..NetworkConfig::new(2, 3)
        };
        let (net, _) = nn_init(&config).unwrap();
        let (x, _) = batch(1, 6, 31);
        let prepared = net.prepare(x.view());
        let reference = net.forward_cached(&prepared, None).hidden[0].act.clone();
        let mut rng = SplitMix64::new(5);
        let draws = 10_000;
        let samples: Vec<Array2<f64>> = (0..draws)
            .map(|_| net.forward_cached(&prepared, Some(&mut rng)).hidden[0].act.clone())
            .collect();
        for (idx, &expected) in reference.iter().enumerate() {
            let vals: Vec<f64> = samples.iter().map(|s| s.iter().nth(idx).copied().unwrap()).collect();
            let mean = vals.iter().sum::<f64>() / draws as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
            let se = (var / draws as f64).sqrt();
            assert!((mean - expected).abs() <= 3.0 * se + 1e-12, "unit {idx}: {mean} vs {expected}");
        }
    }

    #[test]
    fn log_cosh_is_stable() {
        assert_eq!(log_cosh(0.0), 0.0);
        assert!((log_cosh(1.0) - 1.0f64.cosh().ln()).abs() < 1e-15);
        assert!((log_cosh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-9);
    }

    #[test]
    fn config_validation() {
        let mut c = NetworkConfig::new(5, 10);
        assert!(c.validate().is_ok());
        c.dropout_rate = 1.0;
        assert!(c.validate().is_err());
        let mut c = NetworkConfig::new(5, 10);
        c.kernel_rows = 6;
        assert!(c.validate().is_err());
        assert_eq!(NetworkConfig::new(1, 7).kernel_rows, 1);
    }
}
