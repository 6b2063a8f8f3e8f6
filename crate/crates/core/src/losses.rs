//! Reconstruction losses on encoded tables. Every loss returns its value and
//! the gradient with respect to the predictions.
//!
//! The balanced loss weighs each squared error on a one-hot column by the
//! frequency of the category in the fitting split, separately for rows where
//! the category is present (`target = 1`) and absent (`target = 0`):
//!
//! ```text
//! w1 = n / (2 p_q n_k)        w0 = n / (2 p_q (n - n_k))
//! ```
//!
//! with `p_q` the number of categories of the variable and `n_k` the count
//! of the category. Numeric columns keep weight 1. Under these weights every
//! categorical variable, like every `[0, 1]`-scaled numeric column, can
//! contribute at most `n` to the summed error.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tabular::EncoderState;

/// Per-encoded-feature weights: `positive[j]` applies where the target is 1,
/// `negative[j]` where it is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LossWeights {
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    categorical: Vec<bool>,
}

impl LossWeights {
    /// All weights 1, keeping the categorical mask of `enc`.
    pub fn unit(enc: &EncoderState) -> Self {
        let p = enc.width();
        Self {
            positive: alloc::vec![1.0; p],
            negative: alloc::vec![1.0; p],
            categorical: (0..p).map(|j| enc.is_categorical_feature(j)).collect(),
        }
    }

    pub fn from_parts(positive: Vec<f64>, negative: Vec<f64>, categorical: Vec<bool>) -> Result<Self> {
        if positive.len() != negative.len() || positive.len() != categorical.len() {
            return Err(Error::Shape("weight vectors differ in length".into()));
        }
        Ok(Self {
            positive,
            negative,
            categorical,
        })
    }

    pub fn width(&self) -> usize {
        self.positive.len()
    }

    pub fn is_categorical(&self, j: usize) -> bool {
        self.categorical[j]
    }
}

pub fn compute_balance_weights(enc: &EncoderState) -> Result<LossWeights> {
    let n = enc.n();
    let mut weights = LossWeights::unit(enc);
    for group in enc.groups() {
        let col = &enc.schema().columns()[group.column];
        let counts = enc.counts(group.column);
        let p_q = group.len as f64;
        for (k, &count) in counts.iter().enumerate() {
            if count == 0 || count >= n {
                return Err(Error::DegenerateCategory {
                    column: col.name.clone(),
                    category: col.categories().expect("categorical")[k].clone(),
                    count,
                    n,
                });
            }
            let j = group.start + k;
            weights.positive[j] = n as f64 / (2.0 * p_q * count as f64);
            weights.negative[j] = n as f64 / (2.0 * p_q * (n - count) as f64);
        }
    }
    Ok(weights)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossOutput {
    pub value: f64,
    pub grad: Matrix,
}

fn check_shapes(pred: &Matrix, target: &Matrix) -> Result<()> {
    if pred.shape() != target.shape() {
        return Err(Error::Shape(format!(
            "prediction is {}x{}, target is {}x{}",
            pred.rows(),
            pred.cols(),
            target.rows(),
            target.cols()
        )));
    }
    Ok(())
}

/// `(1/(B P)) Σ (t - p̂)²`.
pub fn mse_loss(pred: &Matrix, target: &Matrix) -> Result<LossOutput> {
    check_shapes(pred, target)?;
    let count = (pred.rows() * pred.cols()) as f64;
    let scale = 2.0 / count;
    let mut grad = Matrix::zeros(pred.rows(), pred.cols());
    let mut sum = 0.0;
    for ((g, &p), &t) in grad.as_mut_slice().iter_mut().zip(pred.as_slice()).zip(target.as_slice()) {
        let d = t - p;
        sum += d * d;
        *g = -scale * d;
    }
    Ok(LossOutput {
        value: sum / count,
        grad,
    })
}

/// `(1/(B P)) Σ_j Σ_i w_j(t_ij) (t_ij - p̂_ij)²`, where the weight is picked by
/// the target entry. Unit weights reproduce [`mse_loss`] bit for bit.
pub fn balanced_mse_loss(pred: &Matrix, target: &Matrix, weights: &LossWeights) -> Result<LossOutput> {
    check_shapes(pred, target)?;
    if weights.width() != pred.cols() {
        return Err(Error::Shape(format!(
            "{} weights for {} encoded features",
            weights.width(),
            pred.cols()
        )));
    }
    let (rows, cols) = pred.shape();
    let count = (rows * cols) as f64;
    let scale = 2.0 / count;
    let mut grad = Matrix::zeros(rows, cols);
    let mut sum = 0.0;
    for i in 0..rows {
        let (p_row, t_row) = (pred.row(i), target.row(i));
        let g_row = grad.row_mut(i);
        for j in 0..cols {
            let t = t_row[j];
            let w = if t == 1.0 {
                weights.positive[j]
            } else if t == 0.0 || !weights.categorical[j] {
                weights.negative[j]
            } else {
                return Err(Error::NonBinaryTarget { row: i, col: j, value: t });
            };
            let d = t - p_row[j];
            sum += (w * d) * d;
            g_row[j] = -(scale * w) * d;
        }
    }
    Ok(LossOutput {
        value: sum / count,
        grad,
    })
}

/// `α · MSE + (1 − α) · balanced MSE`.
pub fn blended_loss(alpha: f64, pred: &Matrix, target: &Matrix, weights: &LossWeights) -> Result<LossOutput> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let plain = mse_loss(pred, target)?;
    let balanced = balanced_mse_loss(pred, target, weights)?;
    let mut grad = plain.grad;
    for (g, &b) in grad.as_mut_slice().iter_mut().zip(balanced.grad.as_slice()) {
        *g = alpha * *g + (1.0 - alpha) * b;
    }
    Ok(LossOutput {
        value: alpha * plain.value + (1.0 - alpha) * balanced.value,
        grad,
    })
}

/// Which encoded columns are numeric and which form category groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureLayout {
    pub width: usize,
    pub numeric: Vec<usize>,
    pub groups: Vec<Range<usize>>,
}

impl FeatureLayout {
    pub fn variable_count(&self) -> usize {
        self.numeric.len() + self.groups.len()
    }
}

impl From<&EncoderState> for FeatureLayout {
    fn from(enc: &EncoderState) -> Self {
        Self {
            width: enc.width(),
            numeric: enc.numeric_features().to_vec(),
            groups: enc.groups().iter().map(|g| g.range()).collect(),
        }
    }
}

/// Softmax cross-entropy per category group plus squared error on numeric
/// columns, averaged over rows and variables. `pred` holds logits on the
/// categorical columns.
pub fn cross_entropy_loss(pred: &Matrix, target: &Matrix, layout: &FeatureLayout) -> Result<LossOutput> {
    check_shapes(pred, target)?;
    if pred.cols() != layout.width {
        return Err(Error::Shape(format!(
            "layout describes {} features, prediction has {}",
            layout.width,
            pred.cols()
        )));
    }
    let rows = pred.rows();
    let denom = (rows * layout.variable_count()) as f64;
    let mut grad = Matrix::zeros(rows, pred.cols());
    let mut sum = 0.0;
    let mut probs = Vec::new();
    for i in 0..rows {
        let (p_row, t_row) = (pred.row(i), target.row(i));
        let g_row = grad.row_mut(i);
        for &j in &layout.numeric {
            let d = t_row[j] - p_row[j];
            sum += d * d;
            g_row[j] = -2.0 * d / denom;
        }
        for group in &layout.groups {
            let logits = &p_row[group.clone()];
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            probs.clear();
            probs.extend(logits.iter().map(|&z| libm::exp(z - max)));
            let z: f64 = probs.iter().sum();
            let log_z = max + libm::log(z);
            let t = &t_row[group.clone()];
            let mass: f64 = t.iter().sum();
            for (k, (&logit, &tk)) in logits.iter().zip(t).enumerate() {
                if tk != 0.0 {
                    sum -= tk * (logit - log_z);
                }
                g_row[group.start + k] = (probs[k] / z * mass - tk) / denom;
            }
        }
    }
    Ok(LossOutput {
        value: sum / denom,
        grad,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    Standard,
    Balanced,
    Blended(f64),
    CrossEntropy,
}

impl LossKind {
    pub fn needs_balance_weights(self) -> bool {
        matches!(self, LossKind::Balanced | LossKind::Blended(_))
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossKind::Standard => f.write_str("standard"),
            LossKind::Balanced => f.write_str("balanced"),
            LossKind::Blended(a) => write!(f, "blended:{a}"),
            LossKind::CrossEntropy => f.write_str("ce"),
        }
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "standard" | "mse" => Ok(LossKind::Standard),
            "balanced" | "balmse" => Ok(LossKind::Balanced),
            "ce" | "cross-entropy" => Ok(LossKind::CrossEntropy),
            _ => {
                let alpha = s
                    .strip_prefix("blended:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown loss `{s}`")))?;
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(Error::AlphaOutOfRange(alpha));
                }
                Ok(LossKind::Blended(alpha))
            }
        }
    }
}

/// A loss bound to its weights and feature layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub kind: LossKind,
    pub weights: LossWeights,
    pub layout: FeatureLayout,
}

impl Objective {
    /// Uses balance weights from `enc` for the balanced and blended losses.
    pub fn new(kind: LossKind, enc: &EncoderState) -> Result<Self> {
        let weights = if kind.needs_balance_weights() {
            compute_balance_weights(enc)?
        } else {
            LossWeights::unit(enc)
        };
        Ok(Self {
            kind,
            weights,
            layout: enc.into(),
        })
    }

    pub fn with_weights(kind: LossKind, weights: LossWeights, layout: FeatureLayout) -> Self {
        Self { kind, weights, layout }
    }

    pub fn evaluate(&self, pred: &Matrix, target: &Matrix) -> Result<LossOutput> {
        match self.kind {
            LossKind::Standard => mse_loss(pred, target),
            LossKind::Balanced => balanced_mse_loss(pred, target, &self.weights),
            LossKind::Blended(alpha) => blended_loss(alpha, pred, target, &self.weights),
            LossKind::CrossEntropy => cross_entropy_loss(pred, target, &self.layout),
        }
    }

    pub fn name(&self) -> String {
        self.kind.to_string()
    }
}
