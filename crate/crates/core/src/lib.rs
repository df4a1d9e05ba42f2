//! Advisor-guided goal-conditioned reinforcement learning for grid-world UAV
//! missions.
//!
//! The crate is organised bottom-up: [`world`] simulates the map, LiDAR and
//! flight; [`tasks`] defines missions and rewards; [`advisor`] is the fixed
//! rule-based guidance layer; [`arbitration`] mixes guidance with the
//! learner's own choices; [`replay`], [`nn`] and [`learners`] implement the
//! off-policy learners; [`harness`] runs the evaluation regimes.

pub mod error;
pub mod geom;
pub mod rng;
pub mod tasks;
pub mod world;

pub use error::{Error, Result};
pub use geom::Vec2;
pub mod action;
pub mod advisor;
pub mod arbitration;
pub mod harness;
pub mod replay;
pub mod nn;
pub mod learners;
