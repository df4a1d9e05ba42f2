use std::cmp::Ordering;

use crate::geom::{angular_distance, wrap_angle, Vec2};
use crate::world::{beam_bearing, Lidar, N_BEAMS};

/// Scan- and goal-derived quantities the rules branch on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Features {
    pub d_min: f64,
    pub closest_beam: usize,
    pub closest_bearing: f64,
    pub psi_goal: f64,
    /// High-clearance heading biased toward the goal.
    pub psi_free: f64,
    /// Heading pointing away from the closest return.
    pub psi_rep: f64,
}

/// Among the `top_k` longest beams pick the one closest to the goal bearing.
/// Equal ranges are ranked by goal alignment first, then by beam index.
pub fn features(lidar: &Lidar, position: Vec2, goal: Vec2, top_k: usize) -> Features {
    let ranges = lidar.ranges();
    let closest_beam = lidar.argmin();
    let closest_bearing = wrap_angle(beam_bearing(closest_beam));
    let psi_goal = position.bearing_to(goal);
    let goal_gap = |i: usize| angular_distance(beam_bearing(i), psi_goal);

    let mut order: Vec<usize> = (0..N_BEAMS).collect();
    order.sort_by(|&a, &b| {
        ranges[b]
            .total_cmp(&ranges[a])
            .then_with(|| goal_gap(a).total_cmp(&goal_gap(b)))
            .then(a.cmp(&b))
    });
    let free_beam = order[..top_k.clamp(1, N_BEAMS)]
        .iter()
        .copied()
        .min_by(|&a, &b| match goal_gap(a).total_cmp(&goal_gap(b)) {
            Ordering::Equal => a.cmp(&b),
            o => o,
        })
        .unwrap();

    Features {
        d_min: ranges[closest_beam],
        closest_beam,
        closest_bearing,
        psi_goal,
        psi_free: wrap_angle(beam_bearing(free_beam)),
        psi_rep: wrap_angle(closest_bearing + std::f64::consts::PI),
    }
}
