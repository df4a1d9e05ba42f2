use std::collections::VecDeque;

use super::params::AdvisorParams;
use crate::geom::Vec2;
use crate::tasks::GoalTracker;

/// Windowed progress monitor.
///
/// Fires when, across the last `window` samples, goal distance dropped by
/// less than `eps_prog` and the net displacement stayed under
/// `delta * v_max * window`.
#[derive(Clone, Debug)]
pub struct StuckDetector {
    window: usize,
    eps_prog: f64,
    max_displacement: f64,
    samples: VecDeque<(f64, Vec2)>,
}

impl StuckDetector {
    pub fn new(p: &AdvisorParams) -> Self {
        Self {
            window: p.w_stuck,
            eps_prog: p.eps_prog,
            max_displacement: p.delta * p.v_max * p.w_stuck as f64,
            samples: VecDeque::with_capacity(p.w_stuck),
        }
    }

    pub fn clear(&mut self) {
        self.samples.clear();
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Records one step; returns true when the stuck condition holds.
    pub fn update(&mut self, d_goal: f64, position: Vec2) -> bool {
        if self.samples.len() == self.window {
            self.samples.pop_front();
        }
        self.samples.push_back((d_goal, position));
        if self.samples.len() < self.window {
            return false;
        }
        let (d0, p0) = self.samples[0];
        let (d1, p1) = self.samples[self.window - 1];
        d0 - d1 < self.eps_prog && p0.distance(p1) < self.max_displacement
    }
}

/// Nearest-unvisited goal selection with temporary reassignment when stuck.
#[derive(Clone, Debug)]
pub struct GoalSelector {
    detector: StuckDetector,
    t_cool: usize,
    cooldown_remaining: usize,
    reassigned: Option<Vec2>,
    last_goal: Option<Vec2>,
    reassignments: usize,
}

impl GoalSelector {
    pub fn new(p: &AdvisorParams) -> Self {
        Self { detector: StuckDetector::new(p), t_cool: p.t_cool, cooldown_remaining: 0, reassigned: None, last_goal: None, reassignments: 0 }
    }

    pub fn reassigned_goal(&self) -> Option<Vec2> {
        self.reassigned
    }

    pub fn cooldown_remaining(&self) -> usize {
        self.cooldown_remaining
    }

    pub fn reassignments(&self) -> usize {
        self.reassignments
    }

    /// Active goal for the current position. Call exactly once per step.
    pub fn select(&mut self, tracker: &GoalTracker, position: Vec2) -> Vec2 {
        let order = tracker.unvisited_by_distance(position);
        let nearest = order.first().map(|&i| tracker.goals()[i]);

        if let Some(g) = self.reassigned {
            self.cooldown_remaining = self.cooldown_remaining.saturating_sub(1);
            let still_open = order.iter().any(|&i| tracker.goals()[i] == g);
            if self.cooldown_remaining == 0 || !still_open || nearest == Some(g) {
                self.reassigned = None;
                self.cooldown_remaining = 0;
            }
        }

        let mut goal = self.reassigned.or(nearest).unwrap_or(tracker.terminal());
        if self.last_goal != Some(goal) {
            self.detector.clear();
        }
        let stuck = self.detector.update(position.distance(goal), position);
        if stuck && self.reassigned.is_none() && order.len() >= 2 {
            let next_best = tracker.goals()[order[1]];
            self.reassigned = Some(next_best);
            self.cooldown_remaining = self.t_cool;
            self.reassignments += 1;
            self.detector.clear();
            goal = next_best;
        }
        self.last_goal = Some(goal);
        goal
    }
}
