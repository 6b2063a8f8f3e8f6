#![allow(dead_code)]

use balmse_core::losses::Objective;
use balmse_core::nn::{init_network, Activation, Network};
use balmse_core::tabular::{encode, fit_encoder, Column, ColumnData, Dataset, EncoderState, Schema};
use balmse_core::{Matrix, SeedRng};

/// Mixed table with `rows` rows in which every category occurs, so an
/// encoder can be fitted on it.
pub fn random_mixed(rng: &mut SeedRng, rows: usize) -> Dataset {
    let numeric = 1 + rng.below(2);
    let categorical = 1 + rng.below(3);
    let mut columns = Vec::new();
    let mut data = Vec::new();
    for j in 0..numeric {
        columns.push(Column::numeric(format!("x{j}")));
        let mut v: Vec<f64> = (0..rows).map(|_| rng.normal()).collect();
        v[0] = 5.0; // never constant
        data.push(ColumnData::Numeric(v));
    }
    for j in 0..categorical {
        let cats = 2 + rng.below(3.min(rows - 1));
        columns.push(Column::categorical(format!("q{j}"), (0..cats).map(|k| format!("c{k}"))));
        let mut v: Vec<usize> = (0..rows).map(|i| if i < cats { i } else { rng.below(cats) }).collect();
        rng.shuffle(&mut v);
        data.push(ColumnData::Categorical(v));
    }
    Dataset::new(Schema::new(columns, None).unwrap(), data, None).unwrap()
}

pub fn encoded(d: &Dataset) -> (EncoderState, Matrix) {
    let enc = fit_encoder(d).unwrap();
    let m = encode(d, &enc).unwrap().values;
    (enc, m)
}

/// Up to three layers of at most 20 units ending in `out` units, with
/// random biases.
pub fn random_net(rng: &mut SeedRng, input: usize, out: usize) -> Network {
    let layers = 1 + rng.below(3);
    let mut dims = vec![input];
    for _ in 1..layers {
        dims.push(1 + rng.below(20));
    }
    dims.push(out);
    let acts: Vec<Activation> = (0..layers)
        .map(|_| if rng.below(2) == 0 { Activation::Tanh } else { Activation::Identity })
        .collect();
    let mut net = init_network(&dims, &acts, rng.next_u64()).unwrap();
    for layer in net.layers_mut() {
        layer.bias.iter_mut().for_each(|b| *b = rng.uniform_range(-0.5, 0.5));
    }
    net
}

pub fn random_matrix(rng: &mut SeedRng, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    m.as_mut_slice().iter_mut().for_each(|v| *v = rng.normal());
    m
}

fn parameter_mut(net: &mut Network, mut k: usize) -> &mut f64 {
    for layer in net.layers_mut() {
        let w = layer.weights.as_slice().len();
        if k < w {
            return &mut layer.weights.as_mut_slice()[k];
        }
        k -= w;
        if k < layer.bias.len() {
            return &mut layer.bias[k];
        }
        k -= layer.bias.len();
    }
    panic!("parameter index out of range")
}

/// Largest relative error between analytic and central-difference
/// parameter gradients of `objective(net(x), target)`. Entries where both
/// gradients are below 1e-6 are compared on that absolute scale.
pub fn max_relative_gradient_error(net: &Network, x: &Matrix, target: &Matrix, objective: &Objective) -> f64 {
    const H: f64 = 1e-5;
    let trace = net.forward(x).unwrap();
    let loss = objective.evaluate(trace.output(), target).unwrap();
    let analytic = net.backward(&trace, &loss.grad).unwrap().flatten();
    let value = |n: &Network| objective.evaluate(&n.predict(x).unwrap(), target).unwrap().value;
    let mut worst: f64 = 0.0;
    let mut probe = net.clone();
    for (k, &a) in analytic.iter().enumerate() {
        let original = *parameter_mut(&mut probe, k);
        *parameter_mut(&mut probe, k) = original + H;
        let up = value(&probe);
        *parameter_mut(&mut probe, k) = original - H;
        let down = value(&probe);
        *parameter_mut(&mut probe, k) = original;
        let numeric = (up - down) / (2.0 * H);
        let scale = a.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max((a - numeric).abs() / scale);
    }
    worst
}
