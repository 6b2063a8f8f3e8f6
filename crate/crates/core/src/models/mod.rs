//! Autoencoder and variational autoencoder for encoded tables.

mod autoencoder;
mod curve;
mod vae;

pub use autoencoder::{
    build_autoencoder, latent, reconstruct, reconstruct_encoded, train_autoencoder, train_autoencoder_snapshots,
    train_autoencoder_with_objective, AutoencoderConfig, TrainedAutoencoder, OUTPUT_OFFSET, OUTPUT_SPAN,
};
pub use curve::{checkpoint_epochs, CurvePoint, LearningCurve, CHECKPOINTS};
pub use vae::{
    build_vae, gaussian_kl, reparameterize, train_vae, vae_generate, vae_gradients, vae_input, vae_loss, vae_reconstruct, TrainedVae,
    VaeConfig, VaeLossOutput, VaeNetworks,
};
