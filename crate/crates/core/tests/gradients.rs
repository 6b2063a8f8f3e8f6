mod common;

use balmse_core::losses::{LossKind, Objective};
use balmse_core::models::{build_vae, vae_gradients, vae_input, VaeConfig, VaeNetworks, OUTPUT_OFFSET, OUTPUT_SPAN};
use balmse_core::nn::{Gradients, Network};
use balmse_core::{Matrix, SeedRng};

const KINDS: [LossKind; 4] = [LossKind::Standard, LossKind::Balanced, LossKind::Blended(0.3), LossKind::CrossEntropy];

fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-6)
}

#[test]
fn network_gradients_every_loss() {
    let mut rng = SeedRng::new(77);
    for _ in 0..10 {
        let rows = 3 + rng.below(6);
        let data = common::random_mixed(&mut rng, rows);
        let (enc, target) = common::encoded(&data);
        let width = 1 + rng.below(8);
        let x = common::random_matrix(&mut rng, rows, width);
        let net = common::random_net(&mut rng, x.cols(), enc.width());
        for kind in KINDS {
            let objective = Objective::new(kind, &enc).unwrap();
            let e = common::max_relative_gradient_error(&net, &x, &target, &objective);
            assert!(e < 1e-4, "{kind}: {e:.2e}");
        }
    }
}

/// The autoencoder trains on `(o - 0.05) / 0.9`; the upstream gradient is the
/// loss gradient divided by 0.9.
#[test]
fn output_remap_chain_rule() {
    let mut rng = SeedRng::new(78);
    let data = common::random_mixed(&mut rng, 6);
    let (enc, target) = common::encoded(&data);
    let mut net = common::random_net(&mut rng, target.cols(), target.cols());
    let remap = |o: &Matrix| o.map(|v| (v - OUTPUT_OFFSET) / OUTPUT_SPAN);
    for kind in KINDS {
        let objective = Objective::new(kind, &enc).unwrap();
        let trace = net.forward(&target).unwrap();
        let loss = objective.evaluate(&remap(trace.output()), &target).unwrap();
        let analytic = net.backward(&trace, &loss.grad.map(|g| g / OUTPUT_SPAN)).unwrap().flatten();
        let value = |n: &Network| objective.evaluate(&remap(&n.predict(&target).unwrap()), &target).unwrap().value;
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        let mut k = 0;
        for l in 0..net.layers().len() {
            for idx in 0..net.layers()[l].weights.as_slice().len() {
                let orig = net.layers()[l].weights.as_slice()[idx];
                net.layers_mut()[l].weights.as_mut_slice()[idx] = orig + h;
                let up = value(&net);
                net.layers_mut()[l].weights.as_mut_slice()[idx] = orig - h;
                let down = value(&net);
                net.layers_mut()[l].weights.as_mut_slice()[idx] = orig;
                worst = worst.max(rel_err(analytic[k], (up - down) / (2.0 * h)));
                k += 1;
            }
            k += net.layers()[l].bias.len();
        }
        assert!(worst < 1e-4, "{kind}: {worst:.2e}");
    }
}

fn nets_mut(n: &mut VaeNetworks) -> [&mut Network; 6] {
    [&mut n.hl1, &mut n.hl21, &mut n.hl22, &mut n.hl3, &mut n.hl41, &mut n.hl42]
}

#[test]
fn vae_gradients_match_finite_differences() {
    let mut rng = SeedRng::new(79);
    for kind in KINDS {
        let data = common::random_mixed(&mut rng, 7);
        let (enc, x) = common::encoded(&data);
        let y: Vec<f64> = (0..7).map(|_| rng.uniform()).collect();
        let input = vae_input(&x, &y);
        let y_col = Matrix::from_vec(7, 1, y).unwrap();
        let cfg = VaeConfig {
            dim_hl: 5,
            dim_z: 3,
            seed: rng.next_u64(),
            ..VaeConfig::default()
        };
        let mut nets = build_vae(enc.width(), &cfg).unwrap();
        for net in nets_mut(&mut nets) {
            for layer in net.layers_mut() {
                layer.bias.iter_mut().for_each(|b| *b = rng.uniform_range(-0.3, 0.3));
            }
        }
        let eps = common::random_matrix(&mut rng, 7, 3);
        let objective = Objective::new(kind, &enc).unwrap();
        let (_, grads) = vae_gradients(&nets, &input, &x, &y_col, &eps, &objective).unwrap();
        let analytic: Vec<Vec<f64>> = grads.iter().map(Gradients::flatten).collect();

        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for (which, flat) in analytic.iter().enumerate() {
            let mut copy = nets.clone();
            let layer = &nets_mut(&mut copy)[which].layers()[0];
            let (nw, nb) = (layer.weights.as_slice().len(), layer.bias.len());
            for idx in 0..nw + nb {
                let probe = |delta: f64| {
                    let mut n = nets.clone();
                    let l = &mut nets_mut(&mut n)[which].layers_mut()[0];
                    if idx < nw {
                        l.weights.as_mut_slice()[idx] += delta;
                    } else {
                        l.bias[idx - nw] += delta;
                    }
                    vae_gradients(&n, &input, &x, &y_col, &eps, &objective).unwrap().0.value
                };
                let numeric = (probe(h) - probe(-h)) / (2.0 * h);
                worst = worst.max(rel_err(flat[idx], numeric));
            }
        }
        assert!(worst < 1e-4, "{kind}: {worst:.2e}");
    }
}
