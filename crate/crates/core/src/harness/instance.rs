use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::rng::StreamRng;
use crate::tasks::{shortest_path, MissionSpec, TaskKind};
use crate::world::{segment_is_clear, GridFile, OccupancyGrid};

/// How mission points must be connected for an instance to be accepted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    /// Every required pair is joined by an unobstructed straight segment.
    #[default]
    StraightLine,
    /// Every required pair is joined by a 4-connected free path.
    Connected,
}

/// Mission shape before points are placed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskConfig {
    pub kind: TaskKind,
    /// Delivery goals K (multi-goal only).
    pub goals: usize,
    pub d_cap: f64,
    pub v_tar: f64,
    pub horizon: usize,
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self { kind: TaskKind::MovingTarget, goals: 3, d_cap: 1.5, v_tar: 2.0, horizon: 800 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    pub width: usize,
    pub height: usize,
    pub rho: f64,
    /// Minimum pairwise distance between mission points.
    pub min_separation: f64,
    pub feasibility: Feasibility,
    /// Candidate draws per mission point before placement restarts.
    pub point_tries: usize,
    /// Placement restarts per map before a new map is drawn.
    pub placement_restarts: usize,
    pub map_retries: usize,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            width: 100,
            height: 100,
            rho: 0.20,
            min_separation: 5.0,
            feasibility: Feasibility::StraightLine,
            point_tries: 2000,
            placement_restarts: 20,
            map_retries: 50,
        }
    }
}

/// A generated map with a placed mission.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub grid: Arc<OccupancyGrid>,
    pub start: Vec2,
    pub start_yaw: f64,
    pub mission: MissionSpec,
    pub target_start: Option<Vec2>,
}

/// Serializable instance for `gen-maps` output and reuse across regimes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub grid: GridFile,
    pub start: Vec2,
    pub start_yaw: f64,
    pub mission: MissionSpec,
    #[serde(default)]
    pub target_start: Option<Vec2>,
}

impl Instance {
    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            grid: self.grid.to_file(),
            start: self.start,
            start_yaw: self.start_yaw,
            mission: self.mission.clone(),
            target_start: self.target_start,
        }
    }

    pub fn from_file(f: &InstanceFile) -> Result<Self> {
        Ok(Self {
            grid: Arc::new(OccupancyGrid::from_file(&f.grid)?),
            start: f.start,
            start_yaw: f.start_yaw,
            mission: f.mission.clone(),
            target_start: f.target_start,
        })
    }
}

/// Uniform point in the free area: a free cell, then a uniform offset inside it.
fn sample_free(free: &[(usize, usize)], rng: &mut StreamRng) -> Vec2 {
    let (x, y) = free[rng.random_range(0..free.len())];
    Vec2::new(x as f64 + rng.random::<f64>(), y as f64 + rng.random::<f64>())
}

fn connected(grid: &OccupancyGrid, a: Vec2, b: Vec2, mode: Feasibility) -> bool {
    match mode {
        Feasibility::StraightLine => segment_is_clear(grid, a, b),
        Feasibility::Connected => shortest_path(grid, a.cell(), b.cell()).is_some(),
    }
}

/// Places points one at a time; each must respect the separation from all
/// earlier points and be connected to its listed partners.
fn place(grid: &OccupancyGrid, free: &[(usize, usize)], links: &[Vec<usize>], world: &WorldConfig, rng: &mut StreamRng) -> Option<Vec<Vec2>> {
    let mut placed: Vec<Vec2> = Vec::with_capacity(links.len());
    for partners in links {
        let mut found = None;
        for _ in 0..world.point_tries {
            let c = sample_free(free, rng);
            if placed.iter().any(|p| p.distance(c) < world.min_separation) {
                continue;
            }
            if partners.iter().all(|&j| connected(grid, placed[j], c, world.feasibility)) {
                found = Some(c);
                break;
            }
        }
        placed.push(found?);
    }
    Some(placed)
}

/// Samples a map and mission, rejecting placements whose required pairs are
/// not connected: start to each goal and each goal to the terminal
/// (multi-goal), or start to target (moving target).
pub fn generate_instance(world: &WorldConfig, task: &TaskConfig, rng: &mut StreamRng) -> Result<Instance> {
    let links: Vec<Vec<usize>> = match task.kind {
        TaskKind::MovingTarget => vec![vec![], vec![0]],
        TaskKind::MultiGoal => {
            let k = task.goals;
            let mut l = vec![vec![]];
            l.extend((0..k).map(|_| vec![0]));
            l.push((1..=k).collect());
            l
        }
    };
    for _ in 0..world.map_retries.max(1) {
        let grid = OccupancyGrid::generate(world.width, world.height, world.rho, rng)?;
        let free = grid.free_cells();
        if free.len() < links.len() {
            continue;
        }
        for _ in 0..world.placement_restarts.max(1) {
            let Some(points) = place(&grid, &free, &links, world, rng) else { continue };
            let start = points[0];
            let (mission, target_start) = match task.kind {
                TaskKind::MovingTarget => (
                    MissionSpec { kind: task.kind, goals: vec![], terminal: None, d_cap: task.d_cap, v_tar: task.v_tar, horizon: task.horizon },
                    Some(points[1]),
                ),
                TaskKind::MultiGoal => (
                    MissionSpec {
                        kind: task.kind,
                        goals: points[1..=task.goals].to_vec(),
                        terminal: Some(points[task.goals + 1]),
                        d_cap: task.d_cap,
                        v_tar: 0.0,
                        horizon: task.horizon,
                    },
                    None,
                ),
            };
            // Face the first active goal: the target, or the nearest delivery goal.
            let first = points[1..links.len() - usize::from(task.kind == TaskKind::MultiGoal)]
                .iter()
                .copied()
                .min_by(|a, b| start.distance(*a).total_cmp(&start.distance(*b)))
                .expect("at least one goal");
            let start_yaw = start.bearing_to(first);
            return Ok(Instance { grid: Arc::new(grid), start, start_yaw, mission, target_start });
        }
    }
    Err(Error::InstanceGeneration { attempts: world.map_retries, rho: world.rho })
}
