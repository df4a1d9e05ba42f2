use crate::geom::Vec2;
use crate::world::{UavState, N_BEAMS, R_MAX};

pub const FEATURE_DIM: usize = 6 + N_BEAMS;

/// Normalizers for the observation encoding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncodeScale {
    /// World diagonal; scales the goal displacement.
    pub diag: f64,
    pub v_max: f64,
    pub b_max: f64,
}

/// `[dx, dy, sin yaw, cos yaw, speed, battery, ranges...]`, each in [-1, 1].
/// The goal enters only through the relative displacement.
pub fn encode(state: &UavState, goal: Vec2, scale: &EncodeScale) -> [f64; FEATURE_DIM] {
    let mut x = [0.0; FEATURE_DIM];
    let d = goal - state.position;
    x[0] = (d.x / scale.diag).clamp(-1.0, 1.0);
    x[1] = (d.y / scale.diag).clamp(-1.0, 1.0);
    x[2] = state.yaw.sin();
    x[3] = state.yaw.cos();
    x[4] = (state.speed / scale.v_max).clamp(0.0, 1.0);
    x[5] = (state.battery / scale.b_max).clamp(0.0, 1.0);
    for (o, r) in x[6..].iter_mut().zip(state.lidar.ranges()) {
        *o = r / R_MAX;
    }
    x
}
