//! Balanced reconstruction losses for autoencoders on mixed tabular data.
//!
//! The crate is `no_std` and needs only `alloc`. It covers the whole
//! numerical pipeline:
//!
//! - [`tabular`]: schemas, datasets, one-hot/min-max encoding, the synthetic
//!   generator and train/test splitting.
//! - [`nn`]: dense Tanh networks with exact reverse-mode gradients and Adam.
//! - [`losses`]: standard MSE, balanced MSE, their blend, and a softmax
//!   cross-entropy benchmark.
//! - [`metrics`]: MSEM, balanced accuracy, mixed correlation (Spearman,
//!   Cramér's V, η²), prediction errors and silhouette.
//! - [`models`]: the autoencoder and VAE, their training loops and learning
//!   curves.
//! - [`eval`]: proxy predictors, k-means and the repeated-split experiment
//!   driver.
//!
//! File IO, configuration and the command line live in the `balmse` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod eval;
pub mod linalg;
pub mod losses;
pub mod metrics;
pub mod models;
pub mod nn;
pub mod rng;
pub mod tabular;

pub use error::{Error, ErrorClass, Result};
pub use linalg::Matrix;
pub use rng::SeedRng;
