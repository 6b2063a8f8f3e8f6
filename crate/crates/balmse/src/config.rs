//! Run configuration: TOML (`key = value` under `[section]` headers) or JSON.
//!
//! ```toml
//! seed = 7
//!
//! [data]
//! context = "imbalanced"
//! n = 2000
//!
//! [model]
//! kind = "autoencoder"
//! loss = "balanced"
//! epochs = 1000
//!
//! [experiment]
//! runs = 5
//! epochs = [1000, 3000]
//! losses = ["standard", "balanced"]
//! ```

use std::path::{Path, PathBuf};

use balmse_core::eval::{DataSource, ExperimentConfig, Task, DEFAULT_RIDGE_LAMBDA};
use balmse_core::losses::LossKind;
use balmse_core::models::{AutoencoderConfig, VaeConfig};
use balmse_core::rng::derive_seed;
use balmse_core::tabular::{generate_synthetic, Dataset, SchemaSource, SyntheticContext, SYNTHETIC_COEFF_COUNT};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Autoencoder,
    Vae,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub data: DataSection,
    pub model: ModelSection,
    pub vae: VaeSection,
    pub experiment: ExperimentSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    /// CSV input; empty means synthetic data.
    pub input: String,
    /// Schema sidecar; empty means `<input>.schema` if present, else inferred.
    pub schema: String,
    /// Target column name when the schema is inferred; empty for none.
    pub target: String,
    pub context: String,
    pub n: usize,
    pub coeffs: Vec<f64>,
    pub test_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub kind: ModelKind,
    pub loss: String,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub dim_z: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VaeSection {
    pub dim_hl: usize,
    pub dim_z: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub runs: usize,
    pub epochs: Vec<usize>,
    pub losses: Vec<String>,
    pub task: String,
    pub clusters: usize,
    pub ridge_lambda: f64,
    pub logistic_steps: usize,
    pub logistic_lr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            data: DataSection::default(),
            model: ModelSection::default(),
            vae: VaeSection::default(),
            experiment: ExperimentSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

impl Default for DataSection {
    fn default() -> Self {
        let e = ExperimentConfig::default();
        Self {
            input: String::new(),
            schema: String::new(),
            target: String::new(),
            context: SyntheticContext::Imbalanced.to_string(),
            n: 2000,
            coeffs: vec![1.0; SYNTHETIC_COEFF_COUNT],
            test_fraction: e.test_fraction,
        }
    }
}

impl Default for ModelSection {
    fn default() -> Self {
        let a = AutoencoderConfig::default();
        Self {
            kind: ModelKind::Autoencoder,
            loss: a.loss.to_string(),
            epochs: a.epochs,
            batch_size: a.batch_size,
            learning_rate: a.learning_rate,
            dim_z: a.dim_z,
        }
    }
}

impl Default for VaeSection {
    fn default() -> Self {
        let v = VaeConfig::default();
        Self {
            dim_hl: v.dim_hl,
            dim_z: v.dim_z,
            epochs: v.epochs,
            batch_size: v.batch_size,
            learning_rate: v.learning_rate,
        }
    }
}

impl Default for ExperimentSection {
    fn default() -> Self {
        let e = ExperimentConfig::default();
        Self {
            runs: e.runs,
            epochs: e.epochs,
            losses: e.losses.iter().map(|l| l.to_string()).collect(),
            task: e.task.to_string(),
            clusters: e.clusters,
            ridge_lambda: DEFAULT_RIDGE_LAMBDA,
            logistic_steps: e.logistic_steps,
            logistic_lr: e.logistic_lr,
        }
    }
}

impl RunConfig {
    /// JSON when the first non-blank character is `{`, TOML otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = io::read_text(path).map_err(|e| match e {
            CliError::Io { path, source } => CliError::Config(format!("{}: {source}", path.display())),
            other => other,
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(&self.output.dir)
    }

    pub fn context(&self) -> Result<SyntheticContext> {
        Ok(self.data.context.parse()?)
    }

    pub fn loss(&self) -> Result<LossKind> {
        Ok(self.model.loss.parse()?)
    }

    pub fn autoencoder(&self) -> Result<AutoencoderConfig> {
        Ok(AutoencoderConfig {
            dim_z: self.model.dim_z,
            epochs: self.model.epochs,
            batch_size: self.model.batch_size,
            learning_rate: self.model.learning_rate,
            loss: self.loss()?,
            seed: self.seed,
        })
    }

    pub fn vae(&self) -> Result<VaeConfig> {
        Ok(VaeConfig {
            dim_hl: self.vae.dim_hl,
            dim_z: self.vae.dim_z,
            epochs: self.vae.epochs,
            batch_size: self.vae.batch_size,
            learning_rate: self.vae.learning_rate,
            loss: self.loss()?,
            seed: self.seed,
        })
    }

    fn schema_source(&self, input: &Path) -> Result<SchemaSource> {
        let explicit = (!self.data.schema.is_empty()).then(|| PathBuf::from(&self.data.schema));
        let sidecar = explicit.or_else(|| Some(io::sidecar_path(input)).filter(|p| p.exists()));
        Ok(match sidecar {
            Some(p) => SchemaSource::Given(io::read_schema(&p)?),
            None => SchemaSource::Infer {
                categorical: Vec::new(),
                target: (!self.data.target.is_empty()).then(|| self.data.target.clone()),
            },
        })
    }

    /// The configured CSV, or a synthetic sample drawn from sub-seed 0 of
    /// `seed`.
    pub fn dataset(&self) -> Result<Dataset> {
        if self.data.input.is_empty() {
            let coeffs = &self.data.coeffs;
            Ok(generate_synthetic(self.context()?, self.data.n, derive_seed(self.seed, 0), coeffs)?)
        } else {
            let input = PathBuf::from(&self.data.input);
            io::read_csv(&input, &self.schema_source(&input)?)
        }
    }

    /// Loads table inputs eagerly, so the result is self-contained.
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let source = if self.data.input.is_empty() {
            DataSource::Synthetic {
                context: self.context()?,
                n: self.data.n,
                coeffs: self.data.coeffs.clone(),
            }
        } else {
            DataSource::Table(self.dataset()?)
        };
        let losses = self
            .experiment
            .losses
            .iter()
            .map(|l| l.parse::<LossKind>())
            .collect::<Result<Vec<_>, _>>()?;
        let task: Task = self.experiment.task.parse()?;
        let cfg = ExperimentConfig {
            source,
            runs: self.experiment.runs,
            test_fraction: self.data.test_fraction,
            epochs: self.experiment.epochs.clone(),
            losses,
            dim_z: self.model.dim_z,
            batch_size: self.model.batch_size,
            learning_rate: self.model.learning_rate,
            seed: self.seed,
            clusters: self.experiment.clusters,
            task,
            ridge_lambda: self.experiment.ridge_lambda,
            logistic_steps: self.experiment.logistic_steps,
            logistic_lr: self.experiment.logistic_lr,
            vae: self.vae()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trips_in_both_formats() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
        assert_eq!(RunConfig::parse(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn partial_config_keeps_defaults() {
        let c = RunConfig::parse("seed = 3\n[model]\nloss = \"blended:0.3\"\n").unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.loss().unwrap(), LossKind::Blended(0.3));
        assert_eq!(c.model.epochs, 1000);
        assert_eq!(c.experiment, ExperimentSection::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("[model]\nepoch = 3\n").is_err());
        assert!(RunConfig::parse("[modle]\n").is_err());
        assert!(RunConfig::parse(r#"{"seed": 1, "extra": 2}"#).is_err());
    }

    #[test]
    fn experiment_conversion_validates() {
        let mut c = RunConfig::default();
        assert_eq!(c.experiment().unwrap().epochs, [1000, 2000, 3000]);
        c.experiment.losses = vec!["blended:1.5".into()];
        assert!(c.experiment().is_err());
    }
}
