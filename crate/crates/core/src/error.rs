use thiserror::Error;

/// Errors surfaced by the simulator, learners and experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A sensing query was made from inside an occupied cell. Unreachable in a
    /// correct episode because collisions terminate before that can happen.
    #[error("environment fault: position ({x}, {y}) lies inside an occupied cell")]
    InsideObstacle { x: f64, y: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("layer width mismatch: expected {expected} inputs, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("replay buffer holds {have} records, {need} requested")]
    InsufficientRecords { have: usize, need: usize },

    #[error("instance generation failed after {attempts} attempts (rho = {rho})")]
    InstanceGeneration { attempts: usize, rho: f64 },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
