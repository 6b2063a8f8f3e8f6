//! Dense feed-forward networks, reverse-mode gradients and Adam.

mod adam;
mod checkpoint;
mod network;

pub use adam::{AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use checkpoint::{parse_network, write_network};
pub use network::{init_network, Activation, Gradients, Layer, LayerGradient, Network, Trace};
