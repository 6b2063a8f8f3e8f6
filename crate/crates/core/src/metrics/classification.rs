use alloc::vec::Vec;

use crate::error::{Error, Result};

fn same_length(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn from_labels(y_true: &[bool], y_pred: &[bool]) -> Result<Self> {
        same_length(y_true.len(), y_pred.len())?;
        let mut c = ConfusionCounts::default();
        for (&t, &p) in y_true.iter().zip(y_pred) {
            match (t, p) {
                (true, true) => c.tp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fp += 1,
                (true, false) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// `½ (TP/(TP+FN) + TN/(TN+FP))`.
    pub fn balanced_accuracy(&self) -> Result<f64> {
        let pos = self.tp + self.fn_;
        let neg = self.tn + self.fp;
        if pos == 0 || neg == 0 {
            return Err(Error::SingleClassTruth);
        }
        Ok(0.5 * (self.tp as f64 / pos as f64 + self.tn as f64 / neg as f64))
    }
}

pub fn balanced_accuracy(y_true: &[bool], y_pred: &[bool]) -> Result<f64> {
    ConfusionCounts::from_labels(y_true, y_pred)?.balanced_accuracy()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationScores {
    pub f1: f64,
    pub balanced_accuracy: f64,
    pub accuracy: f64,
    /// False when precision or recall is undefined (no positive predicted or
    /// none present); `f1` is then reported as 0.
    pub f1_defined: bool,
}

pub fn classification_scores(y_true: &[bool], y_pred: &[bool]) -> Result<ClassificationScores> {
    let c = ConfusionCounts::from_labels(y_true, y_pred)?;
    let balanced_accuracy = c.balanced_accuracy()?;
    let f1_defined = c.tp + c.fp > 0 && c.tp + c.fn_ > 0;
    let f1 = if f1_defined {
        2.0 * c.tp as f64 / (2 * c.tp + c.fp + c.fn_) as f64
    } else {
        0.0
    };
    Ok(ClassificationScores {
        f1,
        balanced_accuracy,
        accuracy: (c.tp + c.tn) as f64 / c.total() as f64,
        f1_defined,
    })
}

/// Share of equal labels.
pub fn accuracy(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    same_length(y_true.len(), y_pred.len())?;
    if y_true.is_empty() {
        return Err(Error::LengthMismatch { left: 0, right: 0 });
    }
    let hits = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / y_true.len() as f64)
}

/// Area under the ROC curve via the rank statistic (ties get average ranks).
pub fn auc(y_true: &[bool], scores: &[f64]) -> Result<f64> {
    same_length(y_true.len(), scores.len())?;
    let pos = y_true.iter().filter(|&&t| t).count();
    let neg = y_true.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClassTruth);
    }
    let ranks = super::correlation::average_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(y_true).filter(|(_, &t)| t).map(|(r, _)| r).sum();
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos * neg) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionError {
    pub mse: f64,
    pub mae: f64,
    pub rmse: f64,
}

pub fn prediction_error(y_true: &[f64], y_pred: &[f64]) -> Result<PredictionError> {
    same_length(y_true.len(), y_pred.len())?;
    if y_true.is_empty() {
        return Err(Error::LengthMismatch { left: 0, right: 0 });
    }
    let n = y_true.len() as f64;
    let diffs: Vec<f64> = y_true.iter().zip(y_pred).map(|(t, p)| t - p).collect();
    let mse = diffs.iter().map(|d| d * d).sum::<f64>() / n;
    let mae = diffs.iter().map(|d| libm::fabs(*d)).sum::<f64>() / n;
    Ok(PredictionError {
        mse,
        mae,
        rmse: libm::sqrt(mse),
    })
}
