use alloc::vec;
use alloc::vec::Vec;

use super::network::{Gradients, Network};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// Adam moments for one network, flattened in [`Gradients::flatten`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl AdamState {
    pub fn new(net: &Network) -> Self {
        let n = net.parameter_count();
        Self {
            beta1: ADAM_BETA1,
            beta2: ADAM_BETA2,
            epsilon: ADAM_EPSILON,
            step: 0,
            first: vec![0.0; n],
            second: vec![0.0; n],
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected Adam update of `net` in place.
    pub fn step(&mut self, net: &mut Network, grads: &Gradients, lr: f64) {
        assert_eq!(
            grads.layers.len(),
            net.layers().len(),
            "gradients are not shape-congruent with the network"
        );
        self.step += 1;
        let t = self.step as f64;
        let c1 = 1.0 - libm::pow(self.beta1, t);
        let c2 = 1.0 - libm::pow(self.beta2, t);
        let mut idx = 0;
        for (layer, g) in net.layers_mut().iter_mut().zip(&grads.layers) {
            assert_eq!(layer.weights.shape(), g.weights.shape());
            assert_eq!(layer.bias.len(), g.bias.len());
            let params = layer.weights.as_mut_slice().iter_mut().chain(layer.bias.iter_mut());
            let values = g.weights.as_slice().iter().chain(&g.bias);
            for (p, &gv) in params.zip(values) {
                let m = &mut self.first[idx];
                let v = &mut self.second[idx];
                *m = self.beta1 * *m + (1.0 - self.beta1) * gv;
                *v = self.beta2 * *v + (1.0 - self.beta2) * gv * gv;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *p -= lr * m_hat / (libm::sqrt(v_hat) + self.epsilon);
                idx += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::nn::{init_network, Activation, Layer};

    #[test]
    fn zero_gradients_leave_parameters() {
        let mut net = init_network(&[3, 2], &[Activation::Tanh], 0).unwrap();
        let before = net.clone();
        let mut adam = AdamState::new(&net);
        let g = Gradients::zeros_like(&net);
        for _ in 0..20 {
            adam.step(&mut net, &g, 0.1);
        }
        assert_eq!(net, before);
        assert_eq!(adam.step_count(), 20);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        // m̂ = g and v̂ = g² after one step, so the move is lr·g/(|g|+ε).
        let mut net = Network::from_layers(vec![Layer {
            weights: Matrix::from_vec(1, 1, vec![2.0]).unwrap(),
            bias: vec![0.0],
            activation: Activation::Identity,
        }])
        .unwrap();
        let mut g = Gradients::zeros_like(&net);
        g.layers[0].weights[(0, 0)] = 1.0;
        let mut adam = AdamState::new(&net);
        adam.step(&mut net, &g, 0.1);
        let expected = 2.0 - 0.1 / (1.0 + 1e-8);
        assert!((net.layers()[0].weights[(0, 0)] - expected).abs() < 1e-15);
        assert!((net.layers()[0].weights[(0, 0)] - 1.9).abs() < 1e-8);
    }

    #[test]
    fn identical_streams_identical_trajectories() {
        let mut a = init_network(&[2, 2], &[Activation::Tanh], 8).unwrap();
        let mut b = a.clone();
        let (mut sa, mut sb) = (AdamState::new(&a), AdamState::new(&b));
        let mut g = Gradients::zeros_like(&a);
        for step in 0..10 {
            g.layers[0].weights[(0, 1)] = (step as f64).sin();
            g.layers[0].bias[1] = -0.3 * step as f64;
            sa.step(&mut a, &g, 0.01);
            sb.step(&mut b, &g, 0.01);
        }
        assert_eq!(a, b);
    }
}
