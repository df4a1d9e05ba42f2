use serde::{Deserialize, Serialize};

/// Reward constants. `lambda_p` has no published value and defaults to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardParams {
    pub lambda_t: f64,
    pub r_safe: f64,
    pub lambda_o: f64,
    pub lambda_p: f64,
    pub r_goal: f64,
    pub lambda_b: f64,
    pub db_thr: f64,
    pub r_all: f64,
    pub r_col: f64,
    pub r_bat: f64,
    pub lambda_n: f64,
    pub d_near: f64,
    pub v_near: f64,
}

impl Default for RewardParams {
    fn default() -> Self {
        Self {
            lambda_t: 0.01,
            r_safe: 2.0,
            lambda_o: 0.5,
            lambda_p: 1.0,
            r_goal: 50.0,
            lambda_b: 10.0,
            db_thr: 0.004,
            r_all: 200.0,
            r_col: 200.0,
            r_bat: 200.0,
            lambda_n: 2.0,
            d_near: 3.0,
            v_near: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    None,
    Success,
    Collision,
    BatteryDepleted,
    Timeout,
}

impl Terminal {
    pub fn is_terminal(self) -> bool {
        self != Terminal::None
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Terminal::None => "none",
            Terminal::Success => "success",
            Terminal::Collision => "collision",
            Terminal::BatteryDepleted => "battery",
            Terminal::Timeout => "timeout",
        }
    }
}

/// Precedence: collision, then battery depletion, then success, then timeout.
pub fn check_termination(collided: bool, battery: f64, mission_complete: bool, steps: usize, horizon: usize) -> Terminal {
    if collided {
        Terminal::Collision
    } else if battery <= 0.0 {
        Terminal::BatteryDepleted
    } else if mission_complete {
        Terminal::Success
    } else if steps >= horizon {
        Terminal::Timeout
    } else {
        Terminal::None
    }
}

/// Measured quantities for one transition; everything the reward needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardInputs {
    /// Minimum LiDAR range of the pre-step state.
    pub d_min: f64,
    pub d_goal_before: f64,
    /// Distance from the post-step position to the post-step active goal.
    pub d_goal_after: f64,
    /// Capture regions entered during the step.
    pub captures: usize,
    pub battery_drop: f64,
    pub speed: f64,
    pub moving_target: bool,
    pub terminal: Terminal,
}

/// Per-term contributions, summed in field order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub step: f64,
    pub obstacle: f64,
    pub progress: f64,
    pub goal: f64,
    pub battery: f64,
    pub terminal: f64,
    pub near: f64,
}

impl RewardBreakdown {
    pub fn total(&self) -> f64 {
        self.step + self.obstacle + self.progress + self.goal + self.battery + self.terminal + self.near
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub terminal: Terminal,
    pub breakdown: RewardBreakdown,
}

pub fn compute_reward(p: &RewardParams, x: &RewardInputs) -> StepOutcome {
    let terminal = match x.terminal {
        Terminal::Success => p.r_all,
        Terminal::Collision => -p.r_col,
        Terminal::BatteryDepleted => -p.r_bat,
        Terminal::None | Terminal::Timeout => 0.0,
    };
    let near = if x.moving_target && x.d_goal_before <= p.d_near {
        -p.lambda_n * (x.speed - p.v_near).max(0.0)
    } else {
        0.0
    };
    let breakdown = RewardBreakdown {
        step: -p.lambda_t,
        obstacle: -p.lambda_o * (p.r_safe - x.d_min).max(0.0),
        progress: p.lambda_p * (x.d_goal_before - x.d_goal_after),
        goal: x.captures as f64 * p.r_goal,
        battery: -p.lambda_b * (x.battery_drop - p.db_thr).max(0.0),
        terminal,
        near,
    };
    StepOutcome { reward: breakdown.total(), terminal: x.terminal, breakdown }
}
