//! The fixed rule-based advisor.
//!
//! Everything here is deterministic: the same state, goal and parameters
//! always produce the same [`AdvisorOutput`]. The only stateful piece is the
//! per-episode [`StuckDetector`] inside [`GoalSelector`].

mod features;
mod goal;
mod params;
mod rules;
mod sets;

pub use features::{features, Features};
pub use goal::{GoalSelector, StuckDetector};
pub use params::{AdvisorParams, Regime, RegimeWeights, Weights};
pub use rules::{advised_heading, advised_speed_cap, arbitration_weights, regime};
pub use sets::{build_action_sets, BlockedSector, ContinuousSets, DiscreteSets};

use crate::geom::Vec2;
use crate::world::UavState;

#[derive(Clone, Debug, PartialEq)]
pub struct AdvisorOutput {
    pub regime: Regime,
    pub active_goal: Vec2,
    pub heading: f64,
    pub speed_cap: f64,
    pub weights: Weights,
    pub features: Features,
    pub discrete: DiscreteSets,
    pub continuous: ContinuousSets,
}

/// Stateless advisor evaluation.
#[derive(Clone, Debug, Default)]
pub struct Advisor {
    params: AdvisorParams,
}

impl Advisor {
    pub fn new(params: AdvisorParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &AdvisorParams {
        &self.params
    }

    pub fn evaluate(&self, state: &UavState, goal: Vec2) -> AdvisorOutput {
        let p = &self.params;
        let f = features(&state.lidar, state.position, goal, p.top_k);
        let regime = regime(f.d_min, p);
        let heading = advised_heading(f.d_min, f.psi_rep, f.psi_free, f.psi_goal, p);
        let speed_cap = advised_speed_cap(f.d_min, state.battery, state.position.distance(goal), p);
        let (discrete, continuous) = build_action_sets(&state.lidar, heading, speed_cap, regime, p);
        AdvisorOutput {
            regime,
            active_goal: goal,
            heading,
            speed_cap,
            weights: arbitration_weights(regime, p),
            features: f,
            discrete,
            continuous,
        }
    }
}
