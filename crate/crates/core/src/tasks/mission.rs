use serde::{Deserialize, Serialize};

use crate::geom::{segment_point_distance, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    MultiGoal,
    MovingTarget,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::MultiGoal => "multi_goal",
            TaskKind::MovingTarget => "moving_target",
        }
    }
}

/// A concrete mission. Goals and terminal are only used by `MultiGoal`,
/// `v_tar` only by `MovingTarget`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionSpec {
    pub kind: TaskKind,
    #[serde(default)]
    pub goals: Vec<Vec2>,
    #[serde(default)]
    pub terminal: Option<Vec2>,
    pub d_cap: f64,
    #[serde(default)]
    pub v_tar: f64,
    pub horizon: usize,
}

/// `||p - g|| <= d_cap`, boundary inclusive.
pub fn check_capture(position: Vec2, goal: Vec2, d_cap: f64) -> bool {
    position.distance(goal) <= d_cap
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Delivering,
    ToTerminal,
    Done,
}

/// Which delivery goals have been visited and whether the terminal
/// destination was reached afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct GoalTracker {
    goals: Vec<Vec2>,
    terminal: Vec2,
    visited: Vec<bool>,
    phase: Phase,
}

/// Goals captured during one step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Captures {
    pub goals: Vec<usize>,
    pub terminal: bool,
}

impl Captures {
    pub fn count(&self) -> usize {
        self.goals.len() + usize::from(self.terminal)
    }
}

impl GoalTracker {
    pub fn new(goals: Vec<Vec2>, terminal: Vec2) -> Self {
        let visited = vec![false; goals.len()];
        let phase = if goals.is_empty() { Phase::ToTerminal } else { Phase::Delivering };
        Self { goals, terminal, visited, phase }
    }

    pub fn goals(&self) -> &[Vec2] {
        &self.goals
    }

    pub fn terminal(&self) -> Vec2 {
        self.terminal
    }

    pub fn visited(&self) -> &[bool] {
        &self.visited
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn all_visited(&self) -> bool {
        self.visited.iter().all(|&v| v)
    }

    /// Unvisited goal indices ordered by distance from `p` (index breaks ties).
    pub fn unvisited_by_distance(&self, p: Vec2) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.goals.len()).filter(|&i| !self.visited[i]).collect();
        idx.sort_by(|&a, &b| p.distance(self.goals[a]).total_cmp(&p.distance(self.goals[b])).then(a.cmp(&b)));
        idx
    }

    /// Nearest unvisited goal, or the terminal destination once all are visited.
    pub fn nearest_rule_goal(&self, p: Vec2) -> Vec2 {
        match self.unvisited_by_distance(p).first() {
            Some(&i) => self.goals[i],
            None => self.terminal,
        }
    }

    /// Marks every goal whose capture disc the swept segment `from`-`to`
    /// touches. The terminal counts only once all goals are visited.
    pub fn update(&mut self, from: Vec2, to: Vec2, d_cap: f64) -> Captures {
        let mut caps = Captures::default();
        if self.phase == Phase::Done {
            return caps;
        }
        for (i, g) in self.goals.iter().enumerate() {
            if !self.visited[i] && segment_point_distance(from, to, *g) <= d_cap {
                self.visited[i] = true;
                caps.goals.push(i);
            }
        }
        if self.all_visited() {
            self.phase = Phase::ToTerminal;
            if segment_point_distance(from, to, self.terminal) <= d_cap {
                self.phase = Phase::Done;
                caps.terminal = true;
            }
        }
        caps
    }
}
