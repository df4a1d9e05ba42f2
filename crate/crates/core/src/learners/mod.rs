//! Goal-conditioned Double-DQN and SAC learners.

mod batch;
mod config;
mod dqn;
mod encode;
mod sac;

pub use batch::Batch;
pub use config::LearnerConfig;
pub use dqn::{DqnLearner, DqnLoss};
pub use encode::{encode, EncodeScale, FEATURE_DIM};
pub use sac::{ActorLoss, CriticLoss, PolicyEval, SacLearner, ACTION_DIM};
