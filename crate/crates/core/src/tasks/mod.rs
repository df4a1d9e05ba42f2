//! Missions, goal bookkeeping, target motion, reward and termination.

mod episode;
mod mission;
mod reward;
mod target;

pub use episode::{Episode, StepRecord};
pub use mission::{check_capture, GoalTracker, MissionSpec, Phase, TaskKind};
pub use reward::{check_termination, compute_reward, RewardBreakdown, RewardInputs, RewardParams, StepOutcome, Terminal};
pub use target::{shortest_path, TargetState};
