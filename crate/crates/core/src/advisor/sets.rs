use super::params::{AdvisorParams, Regime};
use crate::action::{DiscreteAction, Direction, N_DISCRETE, N_SPEED_LEVELS};
use crate::geom::{angle_diff, angular_distance, wrap_angle};
use crate::world::{beam_bearing, Lidar, N_BEAMS};

/// Half-width of the blocked sector around each close beam.
pub const BEAM_HALF_WIDTH: f64 = std::f64::consts::PI / N_BEAMS as f64;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSets {
    recommended: [bool; N_DISCRETE],
    avoided: [bool; N_DISCRETE],
}

impl DiscreteSets {
    pub fn from_masks(recommended: [bool; N_DISCRETE], avoided: [bool; N_DISCRETE]) -> Self {
        Self { recommended, avoided }
    }

    pub fn is_recommended(&self, a: DiscreteAction) -> bool {
        self.recommended[a.index()]
    }

    pub fn is_avoided(&self, a: DiscreteAction) -> bool {
        self.avoided[a.index()]
    }

    pub fn recommended(&self) -> Vec<DiscreteAction> {
        DiscreteAction::all().filter(|&a| self.is_recommended(a)).collect()
    }

    pub fn avoided(&self) -> Vec<DiscreteAction> {
        DiscreteAction::all().filter(|&a| self.is_avoided(a)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockedSector {
    pub center: f64,
    pub half_width: f64,
    /// Range of the beam that blocks this sector.
    pub range: f64,
}

/// Recommended heading sector with speed cap, and the blocked sectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousSets {
    pub center: f64,
    pub half_width: f64,
    pub speed_cap: f64,
    blocked: [Option<f64>; N_BEAMS],
}

impl ContinuousSets {
    pub fn in_recommended(&self, heading: f64, speed: f64) -> bool {
        speed <= self.speed_cap && angular_distance(heading, self.center) <= self.half_width
    }

    /// Nearest heading inside the recommended sector (angular clamp).
    pub fn project(&self, heading: f64) -> f64 {
        let d = angle_diff(heading, self.center);
        if d.abs() <= self.half_width {
            wrap_angle(heading)
        } else {
            wrap_angle(self.center + self.half_width.copysign(d))
        }
    }

    pub fn sectors(&self) -> Vec<BlockedSector> {
        (0..N_BEAMS)
            .filter_map(|i| {
                self.blocked[i].map(|range| BlockedSector { center: wrap_angle(beam_bearing(i)), half_width: BEAM_HALF_WIDTH, range })
            })
            .collect()
    }

    /// Smallest blocking range among the open sectors containing `heading`.
    pub fn blocking_range(&self, heading: f64) -> Option<f64> {
        (0..N_BEAMS)
            .filter(|&i| angular_distance(heading, beam_bearing(i)) < BEAM_HALF_WIDTH)
            .filter_map(|i| self.blocked[i])
            .min_by(f64::total_cmp)
    }

    pub fn is_avoided(&self, heading: f64) -> bool {
        self.blocking_range(heading).is_some()
    }

    /// Closest heading outside every blocked sector; `None` if the whole
    /// circle is blocked. Lower beam index breaks ties.
    pub fn nearest_free(&self, heading: f64) -> Option<f64> {
        if !self.is_avoided(heading) {
            return Some(wrap_angle(heading));
        }
        let mut best: Option<(f64, f64)> = None;
        for i in (0..N_BEAMS).filter(|&i| self.blocked[i].is_none()) {
            let c = beam_bearing(i);
            let d = angle_diff(heading, c);
            let clamped = d.clamp(-BEAM_HALF_WIDTH, BEAM_HALF_WIDTH);
            let cand = wrap_angle(c + clamped);
            let gap = angular_distance(heading, cand);
            if best.is_none_or(|(g, _)| gap < g) {
                best = Some((gap, cand));
            }
        }
        best.map(|(_, h)| h)
    }
}

pub fn sector_half_width(regime: Regime, p: &AdvisorParams) -> f64 {
    match regime {
        Regime::Emergency => p.dpsi_emg,
        Regime::Avoidance => p.dpsi_avoid,
        Regime::Nominal => p.dpsi_nom,
    }
}

/// Builds both forms of the recommended and avoided sets.
///
/// Discrete: a moving action is avoided when one step along its cardinal
/// beam would leave less than `r_stop` clearance. Hovering is never
/// avoided, so the `(dir*, 0)` fallback keeps the sets disjoint.
pub fn build_action_sets(lidar: &Lidar, heading: f64, speed_cap: f64, regime: Regime, p: &AdvisorParams) -> (DiscreteSets, ContinuousSets) {
    let ranges = lidar.ranges();
    let mut avoided = [false; N_DISCRETE];
    for a in DiscreteAction::all() {
        avoided[a.index()] = a.level() > 0 && ranges[a.direction().beam()] - a.speed() < p.r_stop;
    }
    let best_dir = Direction::nearest(heading);
    let mut recommended = [false; N_DISCRETE];
    for level in 0..N_SPEED_LEVELS {
        let a = DiscreteAction::new(best_dir, level);
        recommended[a.index()] = a.speed() <= speed_cap && !avoided[a.index()];
    }
    if !recommended.iter().any(|&r| r) {
        recommended[DiscreteAction::new(best_dir, 0).index()] = true;
    }

    let mut blocked = [None; N_BEAMS];
    for (i, b) in blocked.iter_mut().enumerate() {
        if ranges[i] <= p.r_avoid {
            *b = Some(ranges[i]);
        }
    }
    let continuous = ContinuousSets { center: heading, half_width: sector_half_width(regime, p), speed_cap, blocked };
    (DiscreteSets { recommended, avoided }, continuous)
}
