use serde::{Deserialize, Serialize};

use super::{first_hit, OccupancyGrid, UavState};
use crate::geom::{wrap_angle, Vec2};

/// Resolved motion for one step: absolute heading and speed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionCommand {
    pub heading: f64,
    pub speed: f64,
}

impl MotionCommand {
    pub fn new(heading: f64, speed: f64) -> Self {
        Self { heading: wrap_angle(heading), speed: speed.max(0.0) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KinematicStep {
    /// End of the swept segment, or the contact point when `collided`.
    pub position: Vec2,
    pub yaw: f64,
    pub collided: bool,
}

/// Point-mass kinematics with unit time step. The whole swept segment is
/// tested against the grid, so fast moves cannot tunnel through a cell.
pub fn step_kinematics(state: &UavState, cmd: MotionCommand, grid: &OccupancyGrid) -> KinematicStep {
    let p = state.position;
    let yaw = wrap_angle(cmd.heading);
    if cmd.speed <= 0.0 {
        return KinematicStep { position: p, yaw, collided: false };
    }
    let dir = Vec2::from_heading(yaw);
    match first_hit(grid, p, yaw, cmd.speed) {
        Ok(None) => KinematicStep { position: p + dir * cmd.speed, yaw, collided: false },
        Ok(Some(t)) => KinematicStep { position: p + dir * t, yaw, collided: true },
        Err(_) => KinematicStep { position: p, yaw, collided: true },
    }
}
