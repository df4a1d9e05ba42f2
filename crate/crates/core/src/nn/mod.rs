//! Dense networks with analytic gradients, Adam and Huber loss.

mod mlp;
mod optim;

pub use mlp::{param_hash, Forward, Gradients, Mlp, NetFile};
pub use optim::{clip_global_norm, global_norm, huber, Adam, AdamConfig};
