//! Mode-aware prioritized experience replay.

mod buffer;
mod priority;
mod sum_tree;

pub use buffer::{BufferStats, RegimeCounts, ReplayBuffer, ReplayMode, Sample, SampleIndex, StoredAction, TransitionRecord};
pub use priority::{compute_priority, risk_weight, BetaSchedule, ModeWeights, PriorityParams, ReplayMeta};
pub use sum_tree::SumTree;
