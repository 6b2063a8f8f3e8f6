//! Repeated train/test experiments comparing loss functions.
//!
//! Every run draws its own split from a sub-seed of the top-level seed. All
//! loss arms of a run share the split, the encoder, the network
//! initialization and the downstream targets; the baseline rows score the
//! proxy models on the raw training data once per run.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::kmeans::{kmeans, DEFAULT_MAX_ITER};
use super::proxy::{logistic_fit, logistic_probabilities, ridge_fit, OneVsRest, DEFAULT_RIDGE_LAMBDA};
use super::report::{CurveRecord, ExperimentReport, BASELINE};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::losses::{LossKind, Objective};
use crate::metrics::{accuracy, auc, classification_scores, mc_distance, msem, prediction_error, silhouette};
use crate::models::{
    latent, reconstruct, train_autoencoder_snapshots, train_vae, vae_generate, vae_reconstruct, AutoencoderConfig,
    VaeConfig,
};
use crate::rng::derive_seed;
use crate::tabular::{encode, fit_encoder, generate_synthetic, split, Dataset, SyntheticContext, SYNTHETIC_COEFF_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Regression,
    BinaryClassification,
    MultiClass,
    Unsupervised,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Regression => "regression",
            Task::BinaryClassification => "binary",
            Task::MultiClass => "multiclass",
            Task::Unsupervised => "unsupervised",
        }
    }

    pub fn needs_target(self) -> bool {
        self != Task::Unsupervised
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "regression" => Ok(Task::Regression),
            "binary" | "binary-classification" => Ok(Task::BinaryClassification),
            "multiclass" => Ok(Task::MultiClass),
            "unsupervised" => Ok(Task::Unsupervised),
            other => Err(Error::InvalidConfig(format!("unknown task `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synthetic {
        context: SyntheticContext,
        n: usize,
        coeffs: Vec<f64>,
    },
    Table(Dataset),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub runs: usize,
    pub test_fraction: f64,
    pub epochs: Vec<usize>,
    pub losses: Vec<LossKind>,
    pub dim_z: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub clusters: usize,
    pub task: Task,
    pub ridge_lambda: f64,
    pub logistic_steps: usize,
    pub logistic_lr: f64,
    /// Settings of [`vae_experiment`]; its `loss` and `seed` are set per arm.
    pub vae: VaeConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            source: DataSource::Synthetic {
                context: SyntheticContext::Imbalanced,
                n: 2000,
                coeffs: vec![1.0; SYNTHETIC_COEFF_COUNT],
            },
            runs: 20,
            test_fraction: 0.4,
            epochs: vec![1000, 2000, 3000],
            losses: vec![LossKind::Standard, LossKind::Balanced],
            dim_z: 10,
            batch_size: 128,
            learning_rate: 1e-4,
            seed: 0,
            clusters: 4,
            task: Task::Regression,
            ridge_lambda: DEFAULT_RIDGE_LAMBDA,
            logistic_steps: 500,
            logistic_lr: 0.5,
            vae: VaeConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad(format!("test_fraction {} outside (0, 1)", self.test_fraction));
        }
        if self.epochs.is_empty() || self.epochs.contains(&0) {
            return bad("epochs must list positive values".into());
        }
        if self.epochs.iter().collect::<BTreeSet<_>>().len() != self.epochs.len() {
            return bad("epochs values must be distinct".into());
        }
        if self.losses.is_empty() {
            return bad("at least one loss is required".into());
        }
        let names: BTreeSet<String> = self.losses.iter().map(|l| l.to_string()).collect();
        if names.len() != self.losses.len() {
            return bad("loss list has duplicates".into());
        }
        if let Some(LossKind::Blended(a)) = self.losses.iter().find(|l| matches!(l, LossKind::Blended(a) if !(0.0..=1.0).contains(a))) {
            return Err(Error::AlphaOutOfRange(*a));
        }
        if self.dim_z == 0 || self.batch_size == 0 || !(self.learning_rate > 0.0) {
            return bad("dim_z, batch_size and learning_rate must be positive".into());
        }
        if self.clusters < 2 {
            return bad("clusters must be at least 2".into());
        }
        if !(self.ridge_lambda >= 0.0) || !(self.logistic_lr > 0.0) {
            return bad("proxy settings must be positive".into());
        }
        if self.vae.epochs == 0 || self.vae.batch_size == 0 || self.vae.dim_hl == 0 || self.vae.dim_z == 0 {
            return bad("vae settings must be positive".into());
        }
        match &self.source {
            DataSource::Synthetic { n, coeffs, .. } => {
                if *n < 2 {
                    return bad("synthetic n must be at least 2".into());
                }
                if coeffs.len() != SYNTHETIC_COEFF_COUNT {
                    return bad(format!("expected {SYNTHETIC_COEFF_COUNT} coefficients, got {}", coeffs.len()));
                }
            }
            DataSource::Table(d) => {
                if self.task.needs_target() && d.target().is_none() {
                    return bad(format!("task {} needs a target column", self.task));
                }
            }
        }
        Ok(())
    }

    /// The full table the runs split. Synthetic data is drawn once from
    /// sub-seed 0.
    pub fn dataset(&self) -> Result<Dataset> {
        match &self.source {
            DataSource::Synthetic { context, n, coeffs } => {
                generate_synthetic(*context, *n, derive_seed(self.seed, 0), coeffs)
            }
            DataSource::Table(d) => Ok(d.clone()),
        }
    }
}

/// Seed of run `run`; everything random inside the run derives from it.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    derive_seed(seed, run as u64 + 1)
}

enum Targets {
    Regression { train: Vec<f64>, test: Vec<f64> },
    Binary { train: Vec<bool>, test: Vec<bool> },
    Multi { train: Vec<usize>, test: Vec<usize>, classes: usize },
    Unsupervised,
}

/// Sorted distinct target values of both splits.
fn class_values(train: &[f64], test: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = train.iter().chain(test).copied().collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn class_index(values: &[f64], y: f64) -> usize {
    values.partition_point(|&c| c < y)
}

fn nearest_class(values: &[f64], y: f64) -> f64 {
    values
        .iter()
        .copied()
        .fold((f64::INFINITY, values[0]), |best, c| {
            let d = libm::fabs(c - y);
            if d < best.0 {
                (d, c)
            } else {
                best
            }
        })
        .1
}

fn target(d: &Dataset) -> Result<&[f64]> {
    d.target()
        .ok_or_else(|| Error::InvalidConfig("supervised task needs a target column".into()))
}

impl Targets {
    fn new(task: Task, train: &Dataset, test: &Dataset) -> Result<Self> {
        if task == Task::Unsupervised {
            return Ok(Targets::Unsupervised);
        }
        let (tr, te) = (target(train)?, target(test)?);
        Ok(match task {
            Task::Regression => Targets::Regression {
                train: tr.to_vec(),
                test: te.to_vec(),
            },
            Task::BinaryClassification => {
                let classes = class_values(tr, te);
                if classes.len() != 2 {
                    return Err(Error::InvalidConfig(format!(
                        "binary task needs exactly 2 target values, found {}",
                        classes.len()
                    )));
                }
                Targets::Binary {
                    train: tr.iter().map(|&v| v == classes[1]).collect(),
                    test: te.iter().map(|&v| v == classes[1]).collect(),
                }
            }
            Task::MultiClass => {
                let classes = class_values(tr, te);
                if classes.len() < 2 {
                    return Err(Error::SingleClassTruth);
                }
                Targets::Multi {
                    train: tr.iter().map(|&v| class_index(&classes, v)).collect(),
                    test: te.iter().map(|&v| class_index(&classes, v)).collect(),
                    classes: classes.len(),
                }
            }
            Task::Unsupervised => unreachable!(),
        })
    }

    /// Same test labels, training labels replaced by `y` (generated data).
    fn with_train_target(&self, y: &[f64], classes: &[f64]) -> Self {
        match self {
            Targets::Regression { test, .. } => Targets::Regression {
                train: y.to_vec(),
                test: test.clone(),
            },
            Targets::Binary { test, .. } => Targets::Binary {
                train: y.iter().map(|&v| nearest_class(classes, v) == classes[1]).collect(),
                test: test.clone(),
            },
            Targets::Multi { test, classes: k, .. } => Targets::Multi {
                train: y.iter().map(|&v| class_index(classes, nearest_class(classes, v))).collect(),
                test: test.clone(),
                classes: *k,
            },
            Targets::Unsupervised => Targets::Unsupervised,
        }
    }
}

/// Proxy-model scores for features fit on `train` and evaluated on `test`,
/// named `<prefix>_<metric>`.
fn downstream(
    cfg: &ExperimentConfig,
    targets: &Targets,
    prefix: &str,
    train: &Matrix,
    test: &Matrix,
    cluster_seed: u64,
) -> Result<Vec<(String, f64)>> {
    let name = |m: &str| format!("{prefix}_{m}");
    Ok(match targets {
        Targets::Regression { train: y, test: y_test } => {
            let model = ridge_fit(train, y, cfg.ridge_lambda)?;
            let e = prediction_error(y_test, &model.predict(test)?)?;
            vec![(name("mse"), e.mse), (name("mae"), e.mae), (name("rmse"), e.rmse)]
        }
        Targets::Binary { train: y, test: y_test } => {
            let model = logistic_fit(train, y, cfg.logistic_steps, cfg.logistic_lr)?;
            let probs = logistic_probabilities(&model, test)?;
            let pred: Vec<bool> = probs.iter().map(|&p| p > 0.5).collect();
            let s = classification_scores(y_test, &pred)?;
            vec![
                (name("f1"), s.f1),
                (name("bal_acc"), s.balanced_accuracy),
                (name("acc"), s.accuracy),
                (name("auc"), auc(y_test, &probs)?),
            ]
        }
        Targets::Multi {
            train: y,
            test: y_test,
            classes,
        } => {
            let model = OneVsRest::fit(train, y, *classes, cfg.logistic_steps, cfg.logistic_lr)?;
            vec![(name("acc"), accuracy(y_test, &model.predict(test)?)?)]
        }
        Targets::Unsupervised => {
            let k = cfg.clusters.min(train.rows());
            let clusters = kmeans(train, k, cluster_seed, DEFAULT_MAX_ITER)?;
            let s = silhouette(train, &clusters.labels).unwrap_or(0.0);
            vec![(name("silhouette"), s)]
        }
    })
}

fn insert_all(report: &mut ExperimentReport, run: usize, epochs: usize, loss: &str, values: Vec<(String, f64)>) -> Result<()> {
    for (metric, v) in values {
        report.insert(run, epochs, loss, &metric, v)?;
    }
    Ok(())
}

fn wrap(run: usize, seed: u64) -> impl Fn(Error) -> Error {
    move |e| Error::RunFailed {
        run,
        seed,
        source: Box::new(e),
    }
}

/// One run of [`run_experiment`] on the already materialized `data`.
pub fn run_single(cfg: &ExperimentConfig, data: &Dataset, run: usize) -> Result<ExperimentReport> {
    let seed = run_seed(cfg.seed, run);
    autoencoder_run(cfg, data, run, seed).map_err(wrap(run, seed))
}

fn autoencoder_run(cfg: &ExperimentConfig, data: &Dataset, run: usize, seed: u64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new();
    let (train, test) = split(data, cfg.test_fraction, derive_seed(seed, 0))?;
    let (train_x, test_x) = (train.without_target(), test.without_target());
    let enc = fit_encoder(&train_x)?;
    let (train_m, test_m) = (encode(&train_x, &enc)?, encode(&test_x, &enc)?);
    let targets = Targets::new(cfg.task, &train, &test)?;
    let cluster_seed = derive_seed(seed, 5);

    let raw = downstream(cfg, &targets, "raw", &train_m.values, &test_m.values, cluster_seed)?;
    insert_all(&mut report, run, 0, BASELINE, raw)?;

    let ae_cfg = AutoencoderConfig {
        dim_z: cfg.dim_z,
        epochs: *cfg.epochs.iter().max().expect("validated"),
        batch_size: cfg.batch_size,
        learning_rate: cfg.learning_rate,
        loss: LossKind::Standard,
        seed: derive_seed(seed, 1),
    };
    for &loss in &cfg.losses {
        let label = loss.to_string();
        let objective = Objective::new(loss, &enc)?;
        let models = train_autoencoder_snapshots(&train_m, &enc, &objective, &AutoencoderConfig { loss, ..ae_cfg }, &cfg.epochs)?;
        for (model, &epochs) in models.iter().zip(&cfg.epochs) {
            let recon_test = reconstruct(model, &test_x)?;
            let mut values = vec![
                ("msem".to_string(), msem(&test_x, &recon_test, &enc)?),
                ("mc".to_string(), mc_distance(&test_x, &recon_test)?),
            ];
            let recon_train = encode(&reconstruct(model, &train_x)?, &enc)?;
            values.extend(downstream(cfg, &targets, "recon", &recon_train.values, &test_m.values, cluster_seed)?);
            let (z_train, z_test) = (latent(model, &train_x)?, latent(model, &test_x)?);
            values.extend(downstream(cfg, &targets, "latent", &z_train, &z_test, cluster_seed)?);
            insert_all(&mut report, run, epochs, &label, values)?;
            report.curves.push(CurveRecord {
                run,
                loss: label.clone(),
                epochs,
                curve: model.curve.clone(),
                frequencies: (0..enc.width()).map(|j| enc.feature_frequency(j)).collect(),
            });
        }
    }
    Ok(report)
}

/// Runs every configured run in order and merges the reports.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let data = cfg.dataset()?;
    let mut report = ExperimentReport::new();
    for run in 0..cfg.runs {
        report.merge(run_single(cfg, &data, run)?)?;
    }
    Ok(report)
}

/// One run of [`vae_experiment`].
pub fn vae_run_single(cfg: &ExperimentConfig, data: &Dataset, run: usize) -> Result<ExperimentReport> {
    let seed = run_seed(cfg.seed, run);
    vae_run(cfg, data, run, seed).map_err(wrap(run, seed))
}

fn vae_run(cfg: &ExperimentConfig, data: &Dataset, run: usize, seed: u64) -> Result<ExperimentReport> {
    if cfg.task == Task::Unsupervised {
        return Err(Error::InvalidConfig("the VAE experiment needs a supervised task".into()));
    }
    let mut report = ExperimentReport::new();
    let (train, test) = split(data, cfg.test_fraction, derive_seed(seed, 0))?;
    let (train_x, test_x) = (train.without_target(), test.without_target());
    let enc = fit_encoder(&train_x)?;
    let (train_m, test_m) = (encode(&train_x, &enc)?, encode(&test_x, &enc)?);
    let targets = Targets::new(cfg.task, &train, &test)?;
    let classes = class_values(target(&train)?, target(&test)?);
    let cluster_seed = derive_seed(seed, 5);

    let raw = downstream(cfg, &targets, "raw", &train_m.values, &test_m.values, cluster_seed)?;
    insert_all(&mut report, run, 0, BASELINE, raw)?;

    for &loss in &cfg.losses {
        let label = loss.to_string();
        let vae_cfg = VaeConfig {
            loss,
            seed: derive_seed(seed, 2),
            ..cfg.vae
        };
        let model = train_vae(&train, &enc, &vae_cfg)?;
        let recon_test = vae_reconstruct(&model, &test)?.without_target();
        let generated = vae_generate(&model, train.n(), derive_seed(seed, 6))?;
        let gen_x = generated.without_target();
        let mut values = vec![
            ("msem".to_string(), msem(&test_x, &recon_test, &enc)?),
            ("mc".to_string(), mc_distance(&test_x, &recon_test)?),
            ("gen_mc".to_string(), mc_distance(&train_x, &gen_x)?),
            ("final_loss".to_string(), model.loss_curve.last().map_or(f64::NAN, |p| p.1)),
        ];
        let gen_targets = targets.with_train_target(target(&generated)?, &classes);
        let gen_m = encode(&gen_x, &enc)?;
        values.extend(downstream(cfg, &gen_targets, "gen", &gen_m.values, &test_m.values, cluster_seed)?);
        insert_all(&mut report, run, vae_cfg.epochs, &label, values)?;
    }
    Ok(report)
}

/// Trains one VAE per loss and run, generates as many rows as the training
/// split, fits the proxy models on the generated rows and scores them on the
/// real test split.
pub fn vae_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let data = cfg.dataset()?;
    let mut report = ExperimentReport::new();
    for run in 0..cfg.runs {
        report.merge(vae_run_single(cfg, &data, run)?)?;
    }
    Ok(report)
}
