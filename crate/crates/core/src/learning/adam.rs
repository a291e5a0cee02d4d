use ndarray::{ArrayD, Zip};

use crate::error::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// First and second moment estimates, one pair per parameter tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<ArrayD<f64>>,
    pub v: Vec<ArrayD<f64>>,
    pub t: u64,
}

impl AdamState {
    pub fn new(params: &[ArrayD<f64>]) -> Self {
        let zeros: Vec<ArrayD<f64>> = params.iter().map(|p| ArrayD::zeros(p.raw_dim())).collect();
        AdamState {
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut [ArrayD<f64>], grads: &[ArrayD<f64>], lr: f64) -> Result<()> {
        if params.len() != grads.len() || params.len() != self.m.len() {
            return Err(Error::Shape {
                expected: format!("{} tensors", self.m.len()),
                found: format!("{} parameters, {} gradients", params.len(), grads.len()),
            });
        }
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.shape() != g.shape() || p.shape() != self.m[i].shape() {
                return Err(Error::Shape {
                    expected: format!("{:?}", self.m[i].shape()),
                    found: format!("parameter {:?}, gradient {:?}", p.shape(), g.shape()),
                });
            }
        }
        self.t += 1;
        let c1 = 1.0 - BETA1.powf(self.t as f64);
        let c2 = 1.0 - BETA2.powf(self.t as f64);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            Zip::from(p).and(g).and(m).and(v).for_each(|p, &g, m, v| {
                *m = BETA1 * *m + (1.0 - BETA1) * g;
                *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + EPSILON);
            });
        }
        Ok(())
    }
}

pub fn adam_step(
    state: &mut AdamState,
    params: &mut [ArrayD<f64>],
    grads: &[ArrayD<f64>],
    lr: f64,
) -> Result<()> {
    state.step(params, grads, lr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use ndarray::{arr1, IxDyn};

    fn scalar(v: f64) -> Vec<ArrayD<f64>> {
        vec![arr1(&[v]).into_dyn()]
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        for g in [-3.0, 1e-3, 250.0] {
            let mut params = scalar(0.5);
            let mut state = AdamState::new(&params);
            state.step(&mut params, &scalar(g), 0.01).unwrap();
            let moved = params[0][[0]] - 0.5;
            assert!((moved + 0.01 * f64::signum(g)).abs() < 1e-6, "g={g} moved {moved}");
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut params = scalar(2.0);
        let mut state = AdamState::new(&params);
        for _ in 0..5 {
            state.step(&mut params, &scalar(0.0), 0.1).unwrap();
        }
        assert_eq!(params[0][[0]], 2.0);
        assert_eq!(state.t, 5);
    }

    #[test]
    fn minimizes_a_parabola() {
        let mut params = scalar(1.0);
        let mut state = AdamState::new(&params);
        for _ in 0..500 {
            let g = scalar(2.0 * params[0][[0]]);
            state.step(&mut params, &g, 0.1).unwrap();
        }
        assert!(params[0][[0]].abs() < 1e-3, "theta = {}", params[0][[0]]);
    }

    #[test]
    fn descends_random_quadratics() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..20 {
            let dim = 6;
            let curv: Vec<f64> = (0..dim).map(|_| 0.5 + 4.0 * rng.unit_f64()).collect();
            let loss = |x: &ArrayD<f64>| x.iter().zip(&curv).map(|(x, c)| c * x * x).sum::<f64>();
            let mut params = vec![ArrayD::from_shape_simple_fn(IxDyn(&[dim]), || {
                rng.unit_f64() * 4.0 - 2.0
            })];
            let mut state = AdamState::new(&params);
            let grad = |x: &ArrayD<f64>| {
                let mut g = x.clone();
                g.iter_mut().zip(&curv).for_each(|(g, c)| *g *= 2.0 * c);
                g
            };
            for _ in 0..10 {
                let g = grad(&params[0]);
                state.step(&mut params, &[g], 0.01).unwrap();
            }
            let mut prev = loss(&params[0]);
            for _ in 0..50 {
                let g = grad(&params[0]);
                state.step(&mut params, &[g], 0.01).unwrap();
                let now = loss(&params[0]);
                assert!(now <= prev, "{now} > {prev}");
                prev = now;
            }
        }
    }

    #[test]
    fn rejects_mismatched_shapes() {
        let mut params = scalar(1.0);
        let mut state = AdamState::new(&params);
        let bad = vec![ArrayD::zeros(IxDyn(&[2]))];
        assert!(state.step(&mut params, &bad, 0.1).is_err());
        assert!(state.step(&mut params, &[], 0.1).is_err());
        assert_eq!(state.t, 0);
    }
}
