//! Tanh autoencoder with widths `p → p−q → p−2q → p−3q → dim_z` and a
//! mirrored decoder, `q = ⌊p/10⌋`.
//!
//! The decoder ends in Tanh like every other layer. Its output `o` is read
//! as `x̂ = (o − 0.05) / 0.9`, so the `[0, 1]` encoded range sits inside
//! `(0.05, 0.95)` of Tanh's range and exact reconstruction stays reachable.
//! Losses, learning curves and decoding all work on `x̂`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::curve::{checkpoint_epochs, CurvePoint, LearningCurve};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::losses::{LossKind, LossWeights, Objective};
use crate::nn::{init_network, Activation, AdamState, Network};
use crate::rng::{derive_seed, SeedRng};
use crate::tabular::{decode, encode, Dataset, EncodedMatrix, EncoderState};

pub const OUTPUT_OFFSET: f64 = 0.05;
pub const OUTPUT_SPAN: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoencoderConfig {
    pub dim_z: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub loss: LossKind,
    pub seed: u64,
}

impl Default for AutoencoderConfig {
    fn default() -> Self {
        Self {
            dim_z: 10,
            epochs: 1000,
            batch_size: 128,
            learning_rate: 1e-4,
            loss: LossKind::Standard,
            seed: 0,
        }
    }
}

impl AutoencoderConfig {
    fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig("epochs and batch_size must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!("learning rate {}", self.learning_rate)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainedAutoencoder {
    pub encoder: Network,
    pub decoder: Network,
    pub state: EncoderState,
    pub weights: LossWeights,
    pub config: AutoencoderConfig,
    pub curve: LearningCurve,
}

pub fn build_autoencoder(p: usize, dim_z: usize, seed: u64) -> Result<(Network, Network)> {
    let q = p / 10;
    let widths = [p, p.saturating_sub(q), p.saturating_sub(2 * q), p.saturating_sub(3 * q)];
    if dim_z == 0 || widths.iter().any(|&w| w == 0 || w <= dim_z) {
        return Err(Error::DegenerateWidth(format!(
            "widths {widths:?} must all exceed dim_z = {dim_z} (p = {p})"
        )));
    }
    let mut dims: Vec<usize> = widths.to_vec();
    dims.push(dim_z);
    let tanh = [Activation::Tanh; 4];
    let encoder = init_network(&dims, &tanh, derive_seed(seed, 1))?;
    dims.reverse();
    let decoder = init_network(&dims, &tanh, derive_seed(seed, 2))?;
    Ok((encoder, decoder))
}

fn to_data_space(o: &Matrix) -> Matrix {
    o.map(|v| (v - OUTPUT_OFFSET) / OUTPUT_SPAN)
}

fn per_feature_mse(encoder: &Network, decoder: &Network, data: &Matrix) -> Result<Vec<f64>> {
    let recon = to_data_space(&decoder.predict(&encoder.predict(data)?)?);
    let mut errors = vec![0.0; data.cols()];
    for i in 0..data.rows() {
        for (e, (a, b)) in errors.iter_mut().zip(data.row(i).iter().zip(recon.row(i))) {
            *e += (a - b) * (a - b);
        }
    }
    let n = data.rows() as f64;
    errors.iter_mut().for_each(|e| *e /= n);
    Ok(errors)
}

pub fn train_autoencoder(train: &EncodedMatrix, enc: &EncoderState, cfg: &AutoencoderConfig) -> Result<TrainedAutoencoder> {
    let objective = Objective::new(cfg.loss, enc)?;
    train_autoencoder_with_objective(train, enc, &objective, cfg)
}

pub fn train_autoencoder_with_objective(
    train: &EncodedMatrix,
    enc: &EncoderState,
    objective: &Objective,
    cfg: &AutoencoderConfig,
) -> Result<TrainedAutoencoder> {
    let mut models = train_autoencoder_snapshots(train, enc, objective, cfg, &[cfg.epochs])?;
    Ok(models.pop().expect("one snapshot requested"))
}

/// Trains once up to the largest entry of `stops` and returns the model as
/// it stood after each listed epoch count, each with its own 10-point curve.
/// Because nothing in the trajectory depends on the total epoch budget, every
/// snapshot equals a separate run configured with that many epochs.
pub fn train_autoencoder_snapshots(
    train: &EncodedMatrix,
    enc: &EncoderState,
    objective: &Objective,
    cfg: &AutoencoderConfig,
    stops: &[usize],
) -> Result<Vec<TrainedAutoencoder>> {
    cfg.validate()?;
    if stops.is_empty() || stops.contains(&0) {
        return Err(Error::InvalidConfig("snapshot epochs must be non-empty and positive".into()));
    }
    if train.cols() != enc.width() {
        return Err(Error::Shape(format!(
            "training matrix has {} columns, encoder width is {}",
            train.cols(),
            enc.width()
        )));
    }
    if train.rows() == 0 {
        return Err(Error::Shape("empty training matrix".into()));
    }
    let (mut encoder, mut decoder) = build_autoencoder(enc.width(), cfg.dim_z, cfg.seed)?;
    let mut adam_enc = AdamState::new(&encoder);
    let mut adam_dec = AdamState::new(&decoder);
    let mut shuffler = SeedRng::new(derive_seed(cfg.seed, 3));

    let names = enc.feature_names();
    let schedules: Vec<Vec<usize>> = stops.iter().map(|&s| checkpoint_epochs(s)).collect();
    let mut curves: Vec<LearningCurve> = stops
        .iter()
        .map(|_| LearningCurve {
            feature_names: names.clone(),
            points: Vec::new(),
        })
        .collect();
    let mut snapshots: Vec<Option<(Network, Network)>> = vec![None; stops.len()];
    let max_epochs = *stops.iter().max().expect("non-empty");

    let data = &train.values;
    let mut order: Vec<usize> = (0..data.rows()).collect();
    for epoch in 1..=max_epochs {
        shuffler.shuffle(&mut order);
        for (batch_idx, rows) in order.chunks(cfg.batch_size).enumerate() {
            let x = data.select_rows(rows);
            let enc_trace = encoder.forward(&x)?;
            let dec_trace = decoder.forward(enc_trace.output())?;
            let recon = to_data_space(dec_trace.output());
            let loss = objective.evaluate(&recon, &x)?;
            if !loss.value.is_finite() {
                return Err(Error::NonFinite {
                    epoch,
                    batch: batch_idx,
                });
            }
            let grad_out = loss.grad.map(|g| g / OUTPUT_SPAN);
            let (dec_grads, grad_latent) = decoder.backward_with_input(&dec_trace, &grad_out)?;
            let enc_grads = encoder.backward(&enc_trace, &grad_latent)?;
            adam_dec.step(&mut decoder, &dec_grads, cfg.learning_rate);
            adam_enc.step(&mut encoder, &enc_grads, cfg.learning_rate);
        }

        let mut errors = None;
        for (s, schedule) in schedules.iter().enumerate() {
            for _ in schedule.iter().filter(|&&e| e == epoch) {
                if errors.is_none() {
                    errors = Some(per_feature_mse(&encoder, &decoder, data)?);
                }
                let errs = errors.clone().expect("computed above");
                if errs.iter().any(|e| !e.is_finite()) {
                    return Err(Error::NonFinite { epoch, batch: 0 });
                }
                curves[s].points.push(CurvePoint { epoch, errors: errs });
            }
        }
        for (s, &stop) in stops.iter().enumerate() {
            if stop == epoch {
                snapshots[s] = Some((encoder.clone(), decoder.clone()));
            }
        }
    }

    Ok(snapshots
        .into_iter()
        .zip(curves)
        .zip(stops)
        .map(|((nets, curve), &stop)| {
            let (encoder, decoder) = nets.expect("every stop is reached");
            TrainedAutoencoder {
                encoder,
                decoder,
                state: enc.clone(),
                weights: objective.weights.clone(),
                config: AutoencoderConfig { epochs: stop, ..*cfg },
                curve,
            }
        })
        .collect())
}

/// Soft reconstruction `x̂` of an encoded matrix.
pub fn reconstruct_encoded(model: &TrainedAutoencoder, m: &EncodedMatrix) -> Result<EncodedMatrix> {
    let out = model.decoder.predict(&model.encoder.predict(&m.values)?)?;
    Ok(EncodedMatrix {
        values: to_data_space(&out),
    })
}

/// Encode, pass through the autoencoder and hard-decode. The result has the
/// feature schema only.
pub fn reconstruct(model: &TrainedAutoencoder, data: &Dataset) -> Result<Dataset> {
    let m = encode(&data.without_target(), &model.state)?;
    decode(&reconstruct_encoded(model, &m)?, &model.state)
}

/// Latent codes, one row per observation.
pub fn latent(model: &TrainedAutoencoder, data: &Dataset) -> Result<Matrix> {
    let m = encode(&data.without_target(), &model.state)?;
    model.encoder.predict(&m.values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_follow_the_tenth_rule() {
        let (e, d) = build_autoencoder(34, 10, 0).unwrap();
        assert_eq!(e.dims(), vec![34, 31, 28, 25, 10]);
        assert_eq!(d.dims(), vec![10, 25, 28, 31, 34]);
        assert!(e.layers().iter().chain(d.layers()).all(|l| l.activation == Activation::Tanh));
    }

    #[test]
    fn degenerate_widths() {
        assert!(matches!(build_autoencoder(9, 10, 0), Err(Error::DegenerateWidth(_))));
        assert!(build_autoencoder(12, 10, 0).is_err());
        assert!(build_autoencoder(20, 0, 0).is_err());
    }

    #[test]
    fn deterministic_build() {
        assert_eq!(build_autoencoder(33, 10, 5).unwrap(), build_autoencoder(33, 10, 5).unwrap());
        assert_ne!(build_autoencoder(33, 10, 5).unwrap().0, build_autoencoder(33, 10, 6).unwrap().0);
    }
}
