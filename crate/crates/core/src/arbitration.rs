//! Risk-adaptive behavior policy.
//!
//! Each step draws one of three components with the advisor's regime weights:
//! a safety component that masks avoided actions, a recommendation component
//! that restricts to the advised actions, and the learner's own exploration.
//! The learner's value estimates (or proposed action) are used inside every
//! component, so guidance biases rather than replaces the learner.

use rand::Rng;

use crate::action::{ContinuousAction, DiscreteAction, Direction, N_DISCRETE, N_SPEED_LEVELS};
use crate::advisor::{AdvisorOutput, AdvisorParams, Weights};
use crate::geom::angle_diff;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Safe,
    Recommended,
    Explore,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Safe, Component::Recommended, Component::Explore];

    pub fn as_str(self) -> &'static str {
        match self {
            Component::Safe => "safe",
            Component::Recommended => "rec",
            Component::Explore => "exp",
        }
    }
}

/// One categorical draw over `(avoid, rec, exp)`.
pub fn draw_component<R: Rng + ?Sized>(w: &Weights, rng: &mut R) -> Component {
    let u: f64 = rng.random();
    if u < w.avoid {
        Component::Safe
    } else if u < w.avoid + w.rec {
        Component::Recommended
    } else {
        Component::Explore
    }
}

/// Highest-valued allowed index, lowest index on ties.
pub fn greedy(q: &[f64], allowed: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in q.iter().enumerate() {
        if allowed(i) && best.is_none_or(|b| v > q[b]) {
            best = Some(i);
        }
    }
    best
}

/// Uniform with probability `epsilon`, otherwise greedy.
pub fn epsilon_greedy<R: Rng + ?Sized>(q: &[f64], epsilon: f64, rng: &mut R) -> usize {
    if rng.random::<f64>() < epsilon {
        rng.random_range(0..q.len())
    } else {
        greedy(q, |_| true).expect("empty action space")
    }
}

/// Discrete behavior action from the learner's Q-values.
pub fn behavior_discrete<R: Rng + ?Sized>(out: &AdvisorOutput, q: &[f64], epsilon: f64, rng: &mut R) -> (DiscreteAction, Component) {
    debug_assert_eq!(q.len(), N_DISCRETE);
    let c = draw_component(&out.weights, rng);
    let sets = &out.discrete;
    let idx = match c {
        Component::Recommended => greedy(q, |i| sets.is_recommended(DiscreteAction(i))).expect("recommended set is never empty"),
        Component::Safe => greedy(q, |i| !sets.is_avoided(DiscreteAction(i))).unwrap_or_else(|| greedy(q, |_| true).unwrap()),
        Component::Explore => epsilon_greedy(q, epsilon, rng),
    };
    (DiscreteAction(idx), c)
}

fn clamp_turn(target_heading: f64, yaw: f64, dpsi_max: f64) -> f64 {
    angle_diff(target_heading, yaw).clamp(-dpsi_max, dpsi_max)
}

/// Continuous behavior action from the learner's proposal.
///
/// Recommended: speed clipped to the advised cap and the post-step heading
/// projected into the advised sector. Safe: a heading inside a blocked sector
/// is moved to the nearest free heading, speed clipped to `v_avoid`, and
/// further to `range - r_stop` if the turn limit leaves it blocked.
/// Explore: the proposal, clipped to the action bounds.
pub fn behavior_continuous<R: Rng + ?Sized>(
    out: &AdvisorOutput,
    yaw: f64,
    proposal: ContinuousAction,
    p: &AdvisorParams,
    rng: &mut R,
) -> (ContinuousAction, Component) {
    let c = draw_component(&out.weights, rng);
    let speed = proposal.speed.clamp(0.0, p.v_max);
    let turn = proposal.yaw_change.clamp(-p.dpsi_max, p.dpsi_max);
    let heading = yaw + turn;
    let action = match c {
        Component::Explore => ContinuousAction { speed, yaw_change: turn },
        Component::Recommended => {
            let h = out.continuous.project(heading);
            ContinuousAction { speed: speed.min(out.speed_cap), yaw_change: clamp_turn(h, yaw, p.dpsi_max) }
        }
        Component::Safe => {
            let sets = &out.continuous;
            if sets.is_avoided(heading) {
                let h = sets.nearest_free(heading).unwrap_or(heading);
                let yaw_change = clamp_turn(h, yaw, p.dpsi_max);
                let mut speed = speed.min(p.v_avoid);
                if let Some(r) = sets.blocking_range(yaw + yaw_change) {
                    speed = speed.min((r - p.r_stop).max(0.0));
                }
                ContinuousAction { speed, yaw_change }
            } else {
                ContinuousAction { speed, yaw_change: turn }
            }
        }
    };
    (action, c)
}

/// The advisor executed on its own: nearest cardinal at the largest speed
/// level under the cap.
pub fn advisor_only_discrete(out: &AdvisorOutput) -> DiscreteAction {
    let level = (out.speed_cap.floor().max(0.0) as usize).min(N_SPEED_LEVELS - 1);
    DiscreteAction::new(Direction::nearest(out.heading), level)
}

/// The advisor executed on its own: turn toward the advised heading within the
/// yaw-rate bound, at the advised speed cap.
pub fn advisor_only_continuous(out: &AdvisorOutput, yaw: f64, p: &AdvisorParams) -> ContinuousAction {
    ContinuousAction { speed: out.speed_cap.min(p.v_max), yaw_change: clamp_turn(out.heading, yaw, p.dpsi_max) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::advisor::{Advisor, DiscreteSets};
    use crate::geom::Vec2;
    use crate::rng::{stream, Stream};
    use crate::world::{Lidar, UavState};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn output_with(lidar: Lidar, goal: Vec2) -> AdvisorOutput {
        let s = UavState { position: Vec2::new(50.0, 50.0), yaw: 0.0, speed: 0.0, battery: 1.0, lidar };
        Advisor::default().evaluate(&s, goal)
    }

    #[test]
    fn all_recommended_mixture_stays_in_set() {
        let mut out = output_with(Lidar::uniform(10.0), Vec2::new(50.0, 80.0));
        out.weights = Weights::new(0.0, 1.0, 0.0);
        let mut rng = stream(1, &[], Stream::Exploration);
        let q: Vec<f64> = (0..N_DISCRETE).map(|i| ((i * 7) % 11) as f64).collect();
        for _ in 0..1000 {
            let (a, c) = behavior_discrete(&out, &q, 1.0, &mut rng);
            assert_eq!(c, Component::Recommended);
            assert!(out.discrete.is_recommended(a));
        }
    }

    #[test]
    fn safe_component_falls_back_when_everything_is_avoided() {
        let mut out = output_with(Lidar::uniform(0.5), Vec2::new(50.0, 80.0));
        out.weights = Weights::new(1.0, 0.0, 0.0);
        let mut q = vec![0.0; N_DISCRETE];
        q[13] = 5.0;
        let mut rng = stream(1, &[], Stream::Exploration);
        let (a, _) = behavior_discrete(&out, &q, 0.0, &mut rng);
        assert!(!out.discrete.is_avoided(a));
        assert_eq!(a.level(), 0);
        // With every action avoided the mask is dropped entirely.
        let mut rec = [false; N_DISCRETE];
        rec[0] = true;
        out.discrete = DiscreteSets::from_masks(rec, [true; N_DISCRETE]);
        let (a, c) = behavior_discrete(&out, &q, 0.0, &mut rng);
        assert_eq!(c, Component::Safe);
        assert_eq!(a, DiscreteAction(13));
    }

    #[test]
    fn advisor_only_discrete_floor_mapping() {
        let mut out = output_with(Lidar::uniform(10.0), Vec2::new(50.0, 80.0));
        out.heading = FRAC_PI_2;
        out.speed_cap = 2.0;
        assert_eq!(advisor_only_discrete(&out), DiscreteAction::new(Direction::Up, 2));
        out.speed_cap = 0.5;
        assert_eq!(advisor_only_discrete(&out).level(), 0);
    }

    #[test]
    fn advisor_only_continuous_turn_is_clipped() {
        let mut out = output_with(Lidar::uniform(10.0), Vec2::new(0.0, 50.0));
        out.heading = PI;
        let a = advisor_only_continuous(&out, 0.0, &AdvisorParams::default());
        assert!((a.yaw_change - PI / 6.0).abs() < 1e-12);
        assert_eq!(a.speed, out.speed_cap);
    }

    #[test]
    fn continuous_components_respect_bounds() {
        let p = AdvisorParams::default();
        let mut l = Lidar::uniform(10.0);
        for i in 0..6 {
            l.0[i] = 1.4;
        }
        let out = output_with(l, Vec2::new(80.0, 50.0));
        let mut rng = stream(3, &[], Stream::Exploration);
        for k in 0..2000 {
            let proposal = ContinuousAction { speed: (k % 9) as f64 * 0.6 - 0.5, yaw_change: (k % 13) as f64 * 0.2 - 1.2 };
            let (a, _) = behavior_continuous(&out, 0.3, proposal, &p, &mut rng);
            assert!(a.speed >= 0.0 && a.speed <= p.v_max);
            assert!(a.yaw_change.abs() <= p.dpsi_max + 1e-15);
        }
    }

    #[test]
    fn same_stream_same_actions() {
        let out = output_with(Lidar::uniform(1.8), Vec2::new(80.0, 50.0));
        let q: Vec<f64> = (0..N_DISCRETE).map(|i| (i as f64).sin()).collect();
        let run = || {
            let mut rng = stream(11, &[], Stream::Exploration);
            (0..100).map(|_| behavior_discrete(&out, &q, 0.3, &mut rng).0).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
