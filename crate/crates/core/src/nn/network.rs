use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::rng::SeedRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => libm::tanh(z),
            Activation::Identity => z,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }
}

/// `activation(W x + b)` with `W` stored `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn input_width(&self) -> usize {
        self.weights.cols()
    }

    pub fn output_width(&self) -> usize {
        self.weights.rows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

/// Activations recorded by [`Network::forward`]; `pre[k]` and `post[k]` are
/// the values before and after layer `k`'s activation.
#[derive(Debug, Clone)]
pub struct Trace {
    pub input: Matrix,
    pub pre: Vec<Matrix>,
    pub post: Vec<Matrix>,
}

impl Trace {
    pub fn output(&self) -> &Matrix {
        self.post.last().unwrap_or(&self.input)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradient>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGradient {
                    weights: Matrix::zeros(l.output_width(), l.input_width()),
                    bias: vec![0.0; l.output_width()],
                })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.as_slice().iter().chain(&l.bias).all(|&g| g == 0.0))
    }

    /// All entries in layer order, weights (row-major) before biases.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.bias);
        }
        out
    }
}

/// Glorot-uniform weights, zero biases.
pub fn init_network(dims: &[usize], activations: &[Activation], seed: u64) -> Result<Network> {
    if dims.len() < 2 {
        return Err(Error::Dimension(format!("need at least 2 widths, got {}", dims.len())));
    }
    if activations.len() != dims.len() - 1 {
        return Err(Error::Dimension(format!(
            "{} activations for {} layers",
            activations.len(),
            dims.len() - 1
        )));
    }
    if let Some(w) = dims.iter().find(|&&w| w == 0) {
        return Err(Error::Dimension(format!("layer width {w}")));
    }
    let mut rng = SeedRng::new(seed);
    let layers = dims
        .windows(2)
        .zip(activations)
        .map(|(w, &activation)| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let s = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
            let data = (0..fan_in * fan_out).map(|_| rng.uniform_range(-s, s)).collect();
            Layer {
                weights: Matrix::from_vec(fan_out, fan_in, data).expect("sized above"),
                bias: vec![0.0; fan_out],
                activation,
            }
        })
        .collect();
    Ok(Network { layers })
}

impl Network {
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Dimension("network without layers".into()));
        }
        for (k, l) in layers.iter().enumerate() {
            if l.bias.len() != l.output_width() {
                return Err(Error::Dimension(format!("layer {k}: bias length differs from output width")));
            }
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[0].output_width() != pair[1].input_width() {
                return Err(Error::Dimension(format!(
                    "layer {k} outputs {} but layer {} takes {}",
                    pair[0].output_width(),
                    k + 1,
                    pair[1].input_width()
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].input_width()
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].output_width()
    }

    /// Widths from input to output.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.input_width()];
        d.extend(self.layers.iter().map(Layer::output_width));
        d
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.as_slice().len() + l.bias.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.is_finite() && l.bias.iter().all(|b| b.is_finite()))
    }

    pub fn forward(&self, batch: &Matrix) -> Result<Trace> {
        if batch.cols() != self.input_width() {
            return Err(Error::Shape(format!(
                "batch width {} differs from network input width {}",
                batch.cols(),
                self.input_width()
            )));
        }
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post: Vec<Matrix> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let x = post.last().unwrap_or(batch);
            let rows = x.rows();
            let out = layer.output_width();
            let mut z = Matrix::zeros(rows, out);
            for i in 0..rows {
                let xi = x.row(i);
                let zi = z.row_mut(i);
                for (o, zo) in zi.iter_mut().enumerate() {
                    *zo = dot(layer.weights.row(o), xi) + layer.bias[o];
                }
            }
            let a = z.map(|v| layer.activation.apply(v));
            pre.push(z);
            post.push(a);
        }
        Ok(Trace {
            input: batch.clone(),
            pre,
            post,
        })
    }

    /// Convenience wrapper returning only the output activations.
    pub fn predict(&self, batch: &Matrix) -> Result<Matrix> {
        let mut t = self.forward(batch)?;
        Ok(t.post.pop().expect("network has layers"))
    }

    /// Parameter gradients for an upstream gradient on the output.
    pub fn backward(&self, trace: &Trace, grad_output: &Matrix) -> Result<Gradients> {
        self.backward_with_input(trace, grad_output).map(|(g, _)| g)
    }

    /// Parameter gradients plus the gradient with respect to the input batch,
    /// for chaining networks.
    pub fn backward_with_input(&self, trace: &Trace, grad_output: &Matrix) -> Result<(Gradients, Matrix)> {
        if trace.post.len() != self.layers.len() {
            return Err(Error::Shape("trace was not produced by this network".into()));
        }
        let out = trace.output();
        if grad_output.shape() != out.shape() {
            return Err(Error::Shape(format!(
                "output gradient is {}x{}, output is {}x{}",
                grad_output.rows(),
                grad_output.cols(),
                out.rows(),
                out.cols()
            )));
        }
        let mut grads = Gradients::zeros_like(self);
        let mut upstream = grad_output.clone();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let a = &trace.post[k];
            let x = if k == 0 { &trace.input } else { &trace.post[k - 1] };
            let mut dz = upstream;
            if layer.activation == Activation::Tanh {
                for (d, &av) in dz.as_mut_slice().iter_mut().zip(a.as_slice()) {
                    *d *= 1.0 - av * av;
                }
            }
            let g = &mut grads.layers[k];
            let mut dx = Matrix::zeros(x.rows(), x.cols());
            for i in 0..x.rows() {
                let xi = x.row(i);
                let dzi = dz.row(i);
                let dxi = dx.row_mut(i);
                for (o, &d) in dzi.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    g.bias[o] += d;
                    for (gw, &xv) in g.weights.row_mut(o).iter_mut().zip(xi) {
                        *gw += d * xv;
                    }
                    for (dxv, &w) in dxi.iter_mut().zip(layer.weights.row(o)) {
                        *dxv += d * w;
                    }
                }
            }
            upstream = dx;
        }
        Ok((grads, upstream))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(w: f64, act: Activation) -> Network {
        Network::from_layers(vec![Layer {
            weights: Matrix::from_vec(1, 1, vec![w]).unwrap(),
            bias: vec![0.0],
            activation: act,
        }])
        .unwrap()
    }

    #[test]
    fn init_shapes_and_bounds() {
        let net = init_network(&[4, 2], &[Activation::Tanh], 3).unwrap();
        let l = &net.layers()[0];
        assert_eq!(l.weights.shape(), (2, 4));
        assert!(l.weights.as_slice().iter().all(|w| w.abs() < 1.0));
        assert!(l.bias.iter().all(|&b| b == 0.0));
        assert_eq!(net, init_network(&[4, 2], &[Activation::Tanh], 3).unwrap());
        assert_ne!(net, init_network(&[4, 2], &[Activation::Tanh], 4).unwrap());
    }

    #[test]
    fn init_errors() {
        assert!(matches!(init_network(&[4], &[], 0), Err(Error::Dimension(_))));
        assert!(init_network(&[4, 2, 1], &[Activation::Tanh], 0).is_err());
        assert!(init_network(&[4, 0], &[Activation::Tanh], 0).is_err());
    }

    #[test]
    fn forward_examples() {
        let zero = Network::from_layers(vec![Layer {
            weights: Matrix::zeros(3, 2),
            bias: vec![0.0; 3],
            activation: Activation::Tanh,
        }])
        .unwrap();
        let x = Matrix::from_vec(2, 2, vec![1.0, -4.0, 0.3, 9.0]).unwrap();
        assert!(zero.predict(&x).unwrap().as_slice().iter().all(|&v| v == 0.0));

        let id = Network::from_layers(vec![Layer {
            weights: Matrix::identity(2),
            bias: vec![0.0; 2],
            activation: Activation::Identity,
        }])
        .unwrap();
        assert_eq!(id.predict(&x).unwrap(), x);

        // tanh(0.5) from the exponential definition, independent of libm::tanh
        let e = 2.718281828459045f64;
        let reference = (e.powf(0.5) - e.powf(-0.5)) / (e.powf(0.5) + e.powf(-0.5));
        assert!((reference - 0.462117157260010).abs() < 1e-12);
        let out = single(1.0, Activation::Tanh)
            .predict(&Matrix::from_vec(1, 1, vec![0.5]).unwrap())
            .unwrap();
        assert!((out[(0, 0)] - reference).abs() < 1e-12);
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let net = init_network(&[3, 2], &[Activation::Tanh], 0).unwrap();
        assert!(matches!(net.forward(&Matrix::zeros(1, 2)), Err(Error::Shape(_))));
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let net = init_network(&[3, 4, 2], &[Activation::Tanh, Activation::Tanh], 1).unwrap();
        let x = Matrix::from_vec(2, 3, vec![0.1, 0.2, 0.3, -0.4, 0.5, 0.6]).unwrap();
        let t = net.forward(&x).unwrap();
        let g = net.backward(&t, &Matrix::zeros(2, 2)).unwrap();
        assert!(g.is_zero());
        assert!(net.backward(&t, &Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn linear_layer_mse_closed_form() {
        // Identity layer, loss = mean over B of squared error on a single
        // output: dL/dW = (2/B) errᵀ x.
        let net = Network::from_layers(vec![Layer {
            weights: Matrix::from_vec(1, 2, vec![0.3, -0.7]).unwrap(),
            bias: vec![0.1],
            activation: Activation::Identity,
        }])
        .unwrap();
        let x = Matrix::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5], vec![0.0, 3.0]]).unwrap();
        let y = [1.0, 0.0, -2.0];
        let t = net.forward(&x).unwrap();
        let b = 3.0;
        let err: Vec<f64> = (0..3).map(|i| t.output()[(i, 0)] - y[i]).collect();
        let up = Matrix::from_vec(3, 1, err.iter().map(|e| 2.0 * e / b).collect()).unwrap();
        let g = net.backward(&t, &up).unwrap();
        for k in 0..2 {
            let closed: f64 = (0..3).map(|i| err[i] * x[(i, k)]).sum::<f64>() * 2.0 / b;
            assert!((g.layers[0].weights[(0, k)] - closed).abs() < 1e-14);
        }
        let closed_b: f64 = err.iter().sum::<f64>() * 2.0 / b;
        assert!((g.layers[0].bias[0] - closed_b).abs() < 1e-14);
    }
}
