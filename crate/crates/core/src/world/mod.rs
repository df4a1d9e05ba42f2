//! Deterministic 2D occupancy-grid world: map, LiDAR, kinematics, battery.

mod energy;
mod grid;
mod kinematics;
mod lidar;

pub use energy::{update_battery, EnergyModel};
pub use grid::{GridFile, OccupancyGrid};
pub use kinematics::{step_kinematics, KinematicStep, MotionCommand};
pub use lidar::{beam_bearing, first_hit, raycast, segment_is_clear, Lidar, N_BEAMS, R_MAX};

use crate::geom::Vec2;

/// Full UAV state: pose, speed, battery and the current scan.
#[derive(Clone, Debug, PartialEq)]
pub struct UavState {
    pub position: Vec2,
    /// Radians in (-pi, pi].
    pub yaw: f64,
    pub speed: f64,
    pub battery: f64,
    pub lidar: Lidar,
}

impl UavState {
    pub fn d_min(&self) -> f64 {
        self.lidar.min()
    }
}
