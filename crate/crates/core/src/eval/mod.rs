//! Downstream evaluation: proxy predictors, k-means, and the repeated-split
//! experiment driver with its long-format report.

mod experiment;
mod kmeans;
mod proxy;
mod report;

pub use experiment::{
    run_experiment, run_seed, run_single, vae_experiment, vae_run_single, DataSource, ExperimentConfig, Task,
};
pub use kmeans::{kmeans, KMeansResult, DEFAULT_MAX_ITER};
pub use proxy::{
    logistic_fit, logistic_objective, logistic_probabilities, ridge_fit, LinearModel, OneVsRest,
    DEFAULT_RIDGE_LAMBDA, LOGISTIC_LAMBDA,
};
pub use report::{aggregate, median, Aggregate, CellKey, CurveRecord, ExperimentReport, ReportKey, BASELINE};
