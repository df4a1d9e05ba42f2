//! The two action parameterizations and their resolution into motion commands.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::geom::{angular_distance, wrap_angle};
use crate::world::MotionCommand;

pub const N_DIRECTIONS: usize = 4;
pub const N_SPEED_LEVELS: usize = 5;
pub const N_DISCRETE: usize = N_DIRECTIONS * N_SPEED_LEVELS;

/// Cardinal directions in action-index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; N_DIRECTIONS] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    pub fn bearing(self) -> f64 {
        match self {
            Direction::Up => FRAC_PI_2,
            Direction::Down => -FRAC_PI_2,
            Direction::Left => PI,
            Direction::Right => 0.0,
        }
    }

    /// Beam index of the LiDAR ray pointing this way.
    pub fn beam(self) -> usize {
        match self {
            Direction::Right => 0,
            Direction::Up => 9,
            Direction::Left => 18,
            Direction::Down => 27,
        }
    }

    /// Cardinal direction angularly closest to `heading`; action order breaks ties.
    pub fn nearest(heading: f64) -> Direction {
        let mut best = Direction::Up;
        for d in Direction::ALL {
            if angular_distance(heading, d.bearing()) < angular_distance(heading, best.bearing()) {
                best = d;
            }
        }
        best
    }
}

/// Discrete action, indexed as `5 * direction + speed_level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiscreteAction(pub usize);

impl DiscreteAction {
    pub fn new(direction: Direction, level: usize) -> Self {
        assert!(level < N_SPEED_LEVELS);
        let d = Direction::ALL.iter().position(|&x| x == direction).unwrap();
        Self(d * N_SPEED_LEVELS + level)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn direction(self) -> Direction {
        Direction::ALL[self.0 / N_SPEED_LEVELS]
    }

    pub fn level(self) -> usize {
        self.0 % N_SPEED_LEVELS
    }

    /// Speed levels map to 0..=4 cell-units per step.
    pub fn speed(self) -> f64 {
        self.level() as f64
    }

    pub fn command(self) -> MotionCommand {
        MotionCommand::new(self.direction().bearing(), self.speed())
    }

    pub fn all() -> impl Iterator<Item = DiscreteAction> {
        (0..N_DISCRETE).map(DiscreteAction)
    }
}

/// Continuous action: commanded speed and yaw change over one step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousAction {
    pub speed: f64,
    pub yaw_change: f64,
}

impl ContinuousAction {
    pub fn command(self, yaw: f64) -> MotionCommand {
        MotionCommand::new(wrap_angle(yaw + self.yaw_change), self.speed)
    }

    /// Maps to the learner's normalized `[-1, 1]^2` box.
    pub fn normalized(self, v_max: f64, dpsi_max: f64) -> [f64; 2] {
        [2.0 * self.speed / v_max - 1.0, self.yaw_change / dpsi_max]
    }

    pub fn from_normalized(a: [f64; 2], v_max: f64, dpsi_max: f64) -> Self {
        Self { speed: v_max * (a[0] + 1.0) / 2.0, yaw_change: dpsi_max * a[1] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Action {
    Discrete(DiscreteAction),
    Continuous(ContinuousAction),
}

impl Action {
    pub fn command(self, yaw: f64) -> MotionCommand {
        match self {
            Action::Discrete(a) => a.command(),
            Action::Continuous(a) => a.command(yaw),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_layout() {
        assert_eq!(DiscreteAction::new(Direction::Up, 0).index(), 0);
        assert_eq!(DiscreteAction::new(Direction::Down, 3).index(), 8);
        assert_eq!(DiscreteAction::new(Direction::Right, 4).index(), 19);
        for a in DiscreteAction::all() {
            assert_eq!(DiscreteAction::new(a.direction(), a.level()), a);
        }
    }

    #[test]
    fn nearest_cardinal() {
        assert_eq!(Direction::nearest(0.1), Direction::Right);
        assert_eq!(Direction::nearest(FRAC_PI_2 - 0.2), Direction::Up);
        assert_eq!(Direction::nearest(-3.0), Direction::Left);
        assert_eq!(Direction::nearest(-1.4), Direction::Down);
    }

    #[test]
    fn normalization_round_trip() {
        let a = ContinuousAction { speed: 3.0, yaw_change: -0.2 };
        let n = a.normalized(4.0, PI / 6.0);
        let b = ContinuousAction::from_normalized(n, 4.0, PI / 6.0);
        assert!((a.speed - b.speed).abs() < 1e-12 && (a.yaw_change - b.yaw_change).abs() < 1e-12);
    }
}
