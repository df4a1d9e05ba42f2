use std::sync::Arc;

use super::mission::{GoalTracker, MissionSpec, Phase, TaskKind};
use super::reward::{check_termination, compute_reward, RewardInputs, RewardParams, StepOutcome, Terminal};
use super::target::TargetState;
use crate::error::Result;
use crate::geom::{segment_point_distance, wrap_angle, Vec2};
use crate::world::{raycast, step_kinematics, update_battery, EnergyModel, Lidar, MotionCommand, OccupancyGrid, UavState};

/// One executed transition with everything needed to replay its reward.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub prev: UavState,
    pub next: UavState,
    pub cmd: MotionCommand,
    pub goal: Vec2,
    pub next_goal: Vec2,
    pub inputs: RewardInputs,
    pub outcome: StepOutcome,
}

/// A running episode: world, mission progress, target and UAV state.
#[derive(Clone, Debug)]
pub struct Episode {
    grid: Arc<OccupancyGrid>,
    mission: MissionSpec,
    energy: EnergyModel,
    reward: RewardParams,
    state: UavState,
    tracker: GoalTracker,
    target: Option<TargetState>,
    steps: usize,
    terminal: Terminal,
}

impl Episode {
    pub fn new(
        grid: Arc<OccupancyGrid>,
        start: Vec2,
        yaw: f64,
        mission: MissionSpec,
        target: Option<TargetState>,
        energy: EnergyModel,
        reward: RewardParams,
    ) -> Result<Self> {
        let lidar = raycast(&grid, start)?;
        let tracker = GoalTracker::new(mission.goals.clone(), mission.terminal.unwrap_or(start));
        let state = UavState { position: start, yaw: wrap_angle(yaw), speed: 0.0, battery: energy.b_max, lidar };
        Ok(Self { grid, mission, energy, reward, state, tracker, target, steps: 0, terminal: Terminal::None })
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    pub fn mission(&self) -> &MissionSpec {
        &self.mission
    }

    pub fn state(&self) -> &UavState {
        &self.state
    }

    pub fn tracker(&self) -> &GoalTracker {
        &self.tracker
    }

    pub fn target(&self) -> Option<&TargetState> {
        self.target.as_ref()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn terminal(&self) -> Terminal {
        self.terminal
    }

    pub fn is_moving_target(&self) -> bool {
        self.mission.kind == TaskKind::MovingTarget
    }

    /// The goal under the plain nearest-unvisited rule, or the observed
    /// target position.
    pub fn rule_goal(&self) -> Vec2 {
        match &self.target {
            Some(t) if self.is_moving_target() => t.position(),
            _ => self.tracker.nearest_rule_goal(self.state.position),
        }
    }

    /// Executes `cmd` while pursuing `goal`; `next_goal` picks the active goal
    /// for the post-step state (it sees the updated episode).
    pub fn step(&mut self, cmd: MotionCommand, goal: Vec2, next_goal: impl FnOnce(&Episode) -> Vec2) -> StepRecord {
        debug_assert!(!self.terminal.is_terminal(), "stepping a finished episode");
        let prev = self.state.clone();
        let consumption = self.energy.consumption_rate(cmd.speed);
        let battery = update_battery(prev.battery, consumption, 1.0, self.energy.b_max);
        let kin = step_kinematics(&prev, cmd, &self.grid);

        let (captures, complete) = match self.mission.kind {
            TaskKind::MultiGoal => {
                let captures = self.tracker.update(prev.position, kin.position, self.mission.d_cap).count();
                (captures, self.tracker.phase() == Phase::Done)
            }
            TaskKind::MovingTarget => {
                let target = self.target.as_mut().expect("moving-target mission without a target");
                target.advance(&self.grid);
                let caught = segment_point_distance(prev.position, kin.position, target.position()) <= self.mission.d_cap;
                (usize::from(caught), caught)
            }
        };

        let lidar = if kin.collided {
            Lidar::uniform(0.0)
        } else {
            raycast(&self.grid, kin.position).unwrap_or(Lidar::uniform(0.0))
        };
        self.state = UavState { position: kin.position, yaw: kin.yaw, speed: cmd.speed, battery, lidar };
        self.steps += 1;
        self.terminal = check_termination(kin.collided, battery, complete, self.steps, self.mission.horizon);

        let next_goal = next_goal(self);
        let inputs = RewardInputs {
            d_min: prev.d_min(),
            d_goal_before: prev.position.distance(goal),
            d_goal_after: kin.position.distance(next_goal),
            captures,
            battery_drop: prev.battery - battery,
            speed: cmd.speed,
            moving_target: self.is_moving_target(),
            terminal: self.terminal,
        };
        let outcome = compute_reward(&self.reward, &inputs);
        StepRecord { prev, next: self.state.clone(), cmd, goal, next_goal, inputs, outcome }
    }
}
