use alloc::string::String;
use alloc::vec::Vec;

/// Number of learning-curve samples per training run.
pub const CHECKPOINTS: usize = 10;

/// Epochs (1-based) after which the curve is sampled: `ceil(k · epochs / 10)`
/// for `k = 1..=10`. Short runs repeat epochs.
pub fn checkpoint_epochs(epochs: usize) -> Vec<usize> {
    (1..=CHECKPOINTS).map(|k| (k * epochs).div_ceil(CHECKPOINTS)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub epoch: usize,
    /// Mean squared reconstruction error per encoded feature on the training
    /// rows.
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LearningCurve {
    pub feature_names: Vec<String>,
    pub points: Vec<CurvePoint>,
}

impl LearningCurve {
    pub fn last(&self) -> Option<&CurvePoint> {
        self.points.last()
    }

    pub fn is_finite(&self) -> bool {
        self.points.iter().all(|p| p.errors.iter().all(|e| e.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cadence() {
        assert_eq!(checkpoint_epochs(1000), (1..=10).map(|k| 100 * k).collect::<Vec<_>>());
        assert_eq!(checkpoint_epochs(25), [3, 5, 8, 10, 13, 15, 18, 20, 23, 25]);
        assert_eq!(checkpoint_epochs(3).len(), 10);
        assert_eq!(*checkpoint_epochs(3).last().unwrap(), 3);
    }
}
