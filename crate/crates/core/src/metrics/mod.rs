//! Evaluation statistics: reconstruction quality (MSEM), classification and
//! regression scores, mixed correlation matrices and silhouette.

mod classification;
mod correlation;
mod reconstruction;
mod silhouette;

pub use classification::{
    accuracy, auc, balanced_accuracy, classification_scores, prediction_error, ClassificationScores,
    ConfusionCounts, PredictionError,
};
pub use correlation::{
    cramers_v, eta_squared, mc_distance, mixed_correlation, spearman, MixedCorrelationMatrix, PairKind,
};
pub use reconstruction::msem;
pub use silhouette::silhouette;
