//! Small variational autoencoder over the encoded features plus a target
//! column.
//!
//! ```text
//! H1 = tanh(HL1 [x, y])       mu = HL21 H1      logvar = HL22 H1
//! z  = mu + exp(logvar / 2) ⊙ eps
//! H3 = tanh(HL3 z)            x̂ = HL41 H3       ŷ = HL42 H3
//! ```
//!
//! The target enters the encoder min-max scaled with the training range so
//! that the decoder's `y` head has something to reconstruct.

use alloc::format;
use alloc::vec::Vec;

use super::curve::checkpoint_epochs;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::losses::{LossKind, LossWeights, Objective};
use crate::nn::{init_network, Activation, AdamState, Gradients, Network, Trace};
use crate::rng::{derive_seed, SeedRng};
use crate::tabular::{decode, encode, Dataset, EncodedMatrix, EncoderState, Schema};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VaeConfig {
    pub dim_hl: usize,
    pub dim_z: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub loss: LossKind,
    pub seed: u64,
}

impl Default for VaeConfig {
    fn default() -> Self {
        Self {
            dim_hl: 20,
            dim_z: 10,
            epochs: 1000,
            batch_size: 256,
            learning_rate: 1e-3,
            loss: LossKind::Standard,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VaeNetworks {
    pub hl1: Network,
    pub hl21: Network,
    pub hl22: Network,
    pub hl3: Network,
    pub hl41: Network,
    pub hl42: Network,
}

impl VaeNetworks {
    fn all_mut(&mut self) -> [&mut Network; 6] {
        [&mut self.hl1, &mut self.hl21, &mut self.hl22, &mut self.hl3, &mut self.hl41, &mut self.hl42]
    }

    pub fn is_finite(&self) -> bool {
        [&self.hl1, &self.hl21, &self.hl22, &self.hl3, &self.hl41, &self.hl42]
            .iter()
            .all(|n| n.is_finite())
    }
}

#[derive(Debug, Clone)]
pub struct TrainedVae {
    pub nets: VaeNetworks,
    pub state: EncoderState,
    /// Feature schema plus the target column.
    pub schema: Schema,
    /// Training `(min, max)` of the target.
    pub target_range: (f64, f64),
    pub weights: LossWeights,
    pub config: VaeConfig,
    /// `(epoch, total loss on the training rows with z = mu)` at each of the
    /// ten checkpoints.
    pub loss_curve: Vec<(usize, f64)>,
}

/// `p` is the encoded feature width; the encoder takes `p + 1` inputs.
pub fn build_vae(p: usize, cfg: &VaeConfig) -> Result<VaeNetworks> {
    if p == 0 || cfg.dim_hl == 0 || cfg.dim_z == 0 {
        return Err(Error::DegenerateWidth(format!(
            "p = {p}, dim_hl = {}, dim_z = {}",
            cfg.dim_hl, cfg.dim_z
        )));
    }
    let (h, z) = (cfg.dim_hl, cfg.dim_z);
    let net = |i: u64, dims: [usize; 2], act: Activation| init_network(&dims, &[act], derive_seed(cfg.seed, 10 + i));
    Ok(VaeNetworks {
        hl1: net(0, [p + 1, h], Activation::Tanh)?,
        hl21: net(1, [h, z], Activation::Identity)?,
        hl22: net(2, [h, z], Activation::Identity)?,
        hl3: net(3, [z, h], Activation::Tanh)?,
        hl41: net(4, [h, p], Activation::Identity)?,
        hl42: net(5, [h, 1], Activation::Identity)?,
    })
}

fn same_shape(a: &Matrix, b: &Matrix, what: &str) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!(
            "{what}: {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// `mu + exp(logvar / 2) ⊙ noise`.
pub fn reparameterize(mu: &Matrix, logvar: &Matrix, noise: &Matrix) -> Result<Matrix> {
    same_shape(mu, logvar, "mu/logvar")?;
    same_shape(mu, noise, "mu/noise")?;
    let mut out = mu.clone();
    for ((o, &lv), &e) in out.as_mut_slice().iter_mut().zip(logvar.as_slice()).zip(noise.as_slice()) {
        *o += libm::exp(0.5 * lv) * e;
    }
    Ok(out)
}

/// KL divergence of `N(mu, exp(logvar))` from `N(0, I)`, summed over latent
/// dimensions and averaged over rows, with its gradients.
pub fn gaussian_kl(mu: &Matrix, logvar: &Matrix) -> Result<(f64, Matrix, Matrix)> {
    same_shape(mu, logvar, "mu/logvar")?;
    let b = mu.rows().max(1) as f64;
    let mut value = 0.0;
    let mut g_mu = Matrix::zeros(mu.rows(), mu.cols());
    let mut g_lv = Matrix::zeros(mu.rows(), mu.cols());
    for (k, (&m, &lv)) in mu.as_slice().iter().zip(logvar.as_slice()).enumerate() {
        let e = libm::exp(lv);
        value += -0.5 * (1.0 + lv - m * m - e);
        g_mu.as_mut_slice()[k] = m / b;
        g_lv.as_mut_slice()[k] = 0.5 * (e - 1.0) / b;
    }
    Ok((value / b, g_mu, g_lv))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VaeLossOutput {
    pub value: f64,
    pub reconstruction: f64,
    pub target: f64,
    pub kl: f64,
    pub grad_x: Matrix,
    pub grad_y: Matrix,
    pub grad_mu: Matrix,
    pub grad_logvar: Matrix,
}

/// Chosen loss on the feature block, plain MSE on the target head, and the
/// Gaussian KL term with weight 1. `grad_mu` and `grad_logvar` hold the KL
/// part only.
///
/// The feature loss is a per-cell mean; it is scaled by the feature width
/// to match the per-row KL sum.
pub fn vae_loss(
    x_pred: &Matrix,
    x_true: &Matrix,
    y_pred: &Matrix,
    y_true: &Matrix,
    mu: &Matrix,
    logvar: &Matrix,
    objective: &Objective,
) -> Result<VaeLossOutput> {
    same_shape(y_pred, y_true, "target head")?;
    if y_pred.rows() != x_pred.rows() || mu.rows() != x_pred.rows() {
        return Err(Error::Shape("row counts differ between loss inputs".into()));
    }
    let mut recon = objective.evaluate(x_pred, x_true)?;
    let width = x_pred.cols() as f64;
    recon.value *= width;
    recon.grad.as_mut_slice().iter_mut().for_each(|g| *g *= width);
    let target = crate::losses::mse_loss(y_pred, y_true)?;
    let (kl, grad_mu, grad_logvar) = gaussian_kl(mu, logvar)?;
    Ok(VaeLossOutput {
        value: recon.value + target.value + kl,
        reconstruction: recon.value,
        target: target.value,
        kl,
        grad_x: recon.grad,
        grad_y: target.grad,
        grad_mu,
        grad_logvar,
    })
}

fn add(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = a.clone();
    for (o, &v) in out.as_mut_slice().iter_mut().zip(b.as_slice()) {
        *o += v;
    }
    out
}

fn with_target_column(x: &Matrix, y: &[f64]) -> Matrix {
    let mut out = Matrix::zeros(x.rows(), x.cols() + 1);
    for i in 0..x.rows() {
        let row = out.row_mut(i);
        row[..x.cols()].copy_from_slice(x.row(i));
        row[x.cols()] = y[i];
    }
    out
}

struct EncoderPass {
    h1: Trace,
    mu: Trace,
    logvar: Trace,
}

fn encode_pass(nets: &VaeNetworks, input: &Matrix) -> Result<EncoderPass> {
    let h1 = nets.hl1.forward(input)?;
    let mu = nets.hl21.forward(h1.output())?;
    let logvar = nets.hl22.forward(h1.output())?;
    Ok(EncoderPass { h1, mu, logvar })
}

fn decode_latent(nets: &VaeNetworks, z: &Matrix) -> Result<(Matrix, Matrix)> {
    let h3 = nets.hl3.predict(z)?;
    Ok((nets.hl41.predict(&h3)?, nets.hl42.predict(&h3)?))
}

fn scale_target(y: &[f64], (lo, hi): (f64, f64)) -> Vec<f64> {
    y.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Loss and parameter gradients (in `hl1, hl21, hl22, hl3, hl41, hl42`
/// order) for one batch with fixed noise `eps`. `input` is `[x, y]`.
pub fn vae_gradients(
    nets: &VaeNetworks,
    input: &Matrix,
    x: &Matrix,
    y: &Matrix,
    eps: &Matrix,
    objective: &Objective,
) -> Result<(VaeLossOutput, [Gradients; 6])> {
    let enc_pass = encode_pass(nets, input)?;
    let (mu, logvar) = (enc_pass.mu.output(), enc_pass.logvar.output());
    let z = reparameterize(mu, logvar, eps)?;
    let h3 = nets.hl3.forward(&z)?;
    let x_tr = nets.hl41.forward(h3.output())?;
    let y_tr = nets.hl42.forward(h3.output())?;
    let loss = vae_loss(x_tr.output(), x, y_tr.output(), y, mu, logvar, objective)?;

    let (g41, dh3_x) = nets.hl41.backward_with_input(&x_tr, &loss.grad_x)?;
    let (g42, dh3_y) = nets.hl42.backward_with_input(&y_tr, &loss.grad_y)?;
    let (g3, dz) = nets.hl3.backward_with_input(&h3, &add(&dh3_x, &dh3_y))?;
    let d_mu = add(&dz, &loss.grad_mu);
    let mut d_lv = loss.grad_logvar.clone();
    for (k, d) in d_lv.as_mut_slice().iter_mut().enumerate() {
        let std = libm::exp(0.5 * logvar.as_slice()[k]);
        *d += dz.as_slice()[k] * eps.as_slice()[k] * 0.5 * std;
    }
    let (g21, dh1_mu) = nets.hl21.backward_with_input(&enc_pass.mu, &d_mu)?;
    let (g22, dh1_lv) = nets.hl22.backward_with_input(&enc_pass.logvar, &d_lv)?;
    let g1 = nets.hl1.backward(&enc_pass.h1, &add(&dh1_mu, &dh1_lv))?;
    Ok((loss, [g1, g21, g22, g3, g41, g42]))
}

/// `[x, y]` input of the encoder.
pub fn vae_input(x: &Matrix, y: &[f64]) -> Matrix {
    with_target_column(x, y)
}

pub fn train_vae(train: &Dataset, enc: &EncoderState, cfg: &VaeConfig) -> Result<TrainedVae> {
    if cfg.epochs == 0 || cfg.batch_size == 0 || !(cfg.learning_rate > 0.0 && cfg.learning_rate.is_finite()) {
        return Err(Error::InvalidConfig("VAE needs epochs, batch_size and learning rate > 0".into()));
    }
    let y = train
        .target()
        .ok_or_else(|| Error::InvalidSchema("VAE training data needs a target column".into()))?;
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::ConstantNumeric {
            column: train.schema().target().unwrap_or("target").into(),
        });
    }
    let objective = Objective::new(cfg.loss, enc)?;
    let x = encode(&train.without_target(), enc)?.values;
    let y_scaled = scale_target(y, (lo, hi));
    let input = with_target_column(&x, &y_scaled);
    let y_col = Matrix::from_vec(y_scaled.len(), 1, y_scaled)?;

    let mut nets = build_vae(enc.width(), cfg)?;
    let mut adams: Vec<AdamState> = nets.all_mut().iter().map(|n| AdamState::new(n)).collect();
    let mut shuffler = SeedRng::new(derive_seed(cfg.seed, 3));
    let mut noise_rng = SeedRng::new(derive_seed(cfg.seed, 4));
    let checkpoints = checkpoint_epochs(cfg.epochs);
    let mut loss_curve = Vec::with_capacity(checkpoints.len());

    let mut order: Vec<usize> = (0..x.rows()).collect();
    for epoch in 1..=cfg.epochs {
        shuffler.shuffle(&mut order);
        for (batch_idx, rows) in order.chunks(cfg.batch_size).enumerate() {
            let xb = x.select_rows(rows);
            let yb = y_col.select_rows(rows);
            let mut eps = Matrix::zeros(rows.len(), cfg.dim_z);
            eps.as_mut_slice().iter_mut().for_each(|e| *e = noise_rng.normal());
            let (loss, grads) = vae_gradients(&nets, &input.select_rows(rows), &xb, &yb, &eps, &objective)?;
            if !loss.value.is_finite() {
                return Err(Error::NonFinite {
                    epoch,
                    batch: batch_idx,
                });
            }
            for ((net, adam), g) in nets.all_mut().into_iter().zip(adams.iter_mut()).zip(&grads) {
                adam.step(net, g, cfg.learning_rate);
            }
        }
        for _ in checkpoints.iter().filter(|&&e| e == epoch) {
            let pass = encode_pass(&nets, &input)?;
            let (x_hat, y_hat) = decode_latent(&nets, pass.mu.output())?;
            let loss = vae_loss(
                &x_hat,
                &x,
                &y_hat,
                &y_col,
                pass.mu.output(),
                pass.logvar.output(),
                &objective,
            )?;
            if !loss.value.is_finite() {
                return Err(Error::NonFinite { epoch, batch: 0 });
            }
            loss_curve.push((epoch, loss.value));
        }
    }

    Ok(TrainedVae {
        nets,
        state: enc.clone(),
        schema: train.schema().clone(),
        target_range: (lo, hi),
        weights: objective.weights,
        config: *cfg,
        loss_curve,
    })
}

fn to_dataset(model: &TrainedVae, x_hat: Matrix, y_hat: &Matrix) -> Result<Dataset> {
    let features = decode(&EncodedMatrix { values: x_hat }, &model.state)?;
    let (lo, hi) = model.target_range;
    let y = y_hat.as_slice().iter().map(|v| lo + v * (hi - lo)).collect();
    features.with_target(model.schema.target().unwrap_or("y"), y)
}

/// Reconstruction through the posterior means (`z = mu`), hard-decoded, with
/// the target head as the target column.
pub fn vae_reconstruct(model: &TrainedVae, data: &Dataset) -> Result<Dataset> {
    let y = data
        .target()
        .ok_or_else(|| Error::InvalidSchema("VAE reconstruction needs the target column".into()))?;
    let x = encode(&data.without_target(), &model.state)?.values;
    let input = with_target_column(&x, &scale_target(y, model.target_range));
    let pass = encode_pass(&model.nets, &input)?;
    let (x_hat, y_hat) = decode_latent(&model.nets, pass.mu.output())?;
    to_dataset(model, x_hat, &y_hat)
}

/// Decodes `count` draws of `z ~ N(0, I)`.
pub fn vae_generate(model: &TrainedVae, count: usize, seed: u64) -> Result<Dataset> {
    if count == 0 {
        return Err(Error::Shape("cannot generate an empty sample".into()));
    }
    let mut rng = SeedRng::new(seed);
    let mut z = Matrix::zeros(count, model.config.dim_z);
    z.as_mut_slice().iter_mut().for_each(|v| *v = rng.normal());
    let (x_hat, y_hat) = decode_latent(&model.nets, &z)?;
    to_dataset(model, x_hat, &y_hat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wiring() {
        let cfg = VaeConfig::default();
        let nets = build_vae(30, &cfg).unwrap();
        assert_eq!(nets.hl1.dims(), [31, 20]);
        assert_eq!(nets.hl21.dims(), [20, 10]);
        assert_eq!(nets.hl22.dims(), [20, 10]);
        assert_eq!(nets.hl3.dims(), [10, 20]);
        assert_eq!(nets.hl41.dims(), [20, 30]);
        assert_eq!(nets.hl42.dims(), [20, 1]);
        assert_eq!(nets, build_vae(30, &cfg).unwrap());
        assert_ne!(nets, build_vae(30, &VaeConfig { seed: 1, ..cfg }).unwrap());
        assert_eq!(nets.hl1.layers()[0].activation, Activation::Tanh);
        assert_eq!(nets.hl41.layers()[0].activation, Activation::Identity);
    }

    #[test]
    fn reparameterize_examples() {
        let eps = Matrix::from_vec(1, 3, alloc::vec![0.25, -1.5, 2.0]).unwrap();
        let zero = Matrix::zeros(1, 3);
        assert_eq!(reparameterize(&zero, &zero, &eps).unwrap(), eps);
        let mu = Matrix::from_vec(1, 3, alloc::vec![1.0, -2.0, 0.5]).unwrap();
        let tiny = Matrix::from_vec(1, 3, alloc::vec![-50.0; 3]).unwrap();
        assert!(reparameterize(&mu, &tiny, &eps).unwrap().max_abs_diff(&mu) < 1e-10);
        // dyadic values keep every sum exact
        let shifted = mu.map(|v| v + 3.0);
        let a = reparameterize(&mu, &zero, &eps).unwrap();
        let b = reparameterize(&shifted, &zero, &eps).unwrap();
        assert_eq!(b, a.map(|v| v + 3.0));
        assert!(reparameterize(&mu, &Matrix::zeros(1, 2), &eps).is_err());
    }

    #[test]
    fn kl_spot_values() {
        let zero = Matrix::zeros(2, 4);
        assert_eq!(gaussian_kl(&zero, &zero).unwrap().0, 0.0);
        let one = Matrix::from_vec(1, 1, alloc::vec![1.0]).unwrap();
        let (kl, g_mu, g_lv) = gaussian_kl(&one, &Matrix::zeros(1, 1)).unwrap();
        assert!((kl - 0.5).abs() < 1e-12);
        assert_eq!(g_mu.as_slice(), [1.0]);
        assert_eq!(g_lv.as_slice(), [0.0]);
    }
}
