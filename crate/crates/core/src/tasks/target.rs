use std::collections::VecDeque;

use rand::Rng;

use crate::geom::Vec2;
use crate::rng::StreamRng;
use crate::world::OccupancyGrid;

const WAYPOINT_RETRIES: usize = 16;

/// Shortest 4-connected path through free cells, excluding `from` itself.
/// Neighbours are expanded in a fixed order so ties resolve identically.
pub fn shortest_path(grid: &OccupancyGrid, from: (i64, i64), to: (i64, i64)) -> Option<Vec<(i64, i64)>> {
    if grid.is_occupied(from.0, from.1) || grid.is_occupied(to.0, to.1) {
        return None;
    }
    if from == to {
        return Some(Vec::new());
    }
    let w = grid.width();
    let idx = |c: (i64, i64)| c.1 as usize * w + c.0 as usize;
    let mut prev = vec![usize::MAX; w * grid.height()];
    prev[idx(from)] = idx(from);
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        for (dx, dy) in [(0, 1), (0, -1), (-1, 0), (1, 0)] {
            let n = (c.0 + dx, c.1 + dy);
            if grid.is_occupied(n.0, n.1) || prev[idx(n)] != usize::MAX {
                continue;
            }
            prev[idx(n)] = idx(c);
            if n == to {
                let mut path = vec![n];
                let mut cur = idx(c);
                while cur != idx(from) {
                    path.push(((cur % w) as i64, (cur / w) as i64));
                    cur = prev[cur];
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(n);
        }
    }
    None
}

fn center((x, y): (i64, i64)) -> Vec2 {
    Vec2::new(x as f64 + 0.5, y as f64 + 0.5)
}

/// A target patrolling seeded waypoints along shortest free paths at a fixed
/// speed in cells per step.
#[derive(Clone, Debug)]
pub struct TargetState {
    position: Vec2,
    path: Vec<(i64, i64)>,
    cursor: usize,
    speed: f64,
    rng: StreamRng,
}

impl TargetState {
    /// Starts at `position`, which must lie in a free cell.
    pub fn new(position: Vec2, speed: f64, rng: StreamRng) -> Self {
        Self { position, path: Vec::new(), cursor: 0, speed, rng }
    }

    pub fn position(&self) -> Vec2 {
        self.position
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn remaining_path(&self) -> &[(i64, i64)] {
        &self.path[self.cursor..]
    }

    fn plan(&mut self, grid: &OccupancyGrid) -> bool {
        let from = self.position.cell();
        for _ in 0..WAYPOINT_RETRIES {
            let to = (self.rng.random_range(0..grid.width() as i64), self.rng.random_range(0..grid.height() as i64));
            if to == from || grid.is_occupied(to.0, to.1) {
                continue;
            }
            if let Some(path) = shortest_path(grid, from, to) {
                self.path = path;
                self.cursor = 0;
                return true;
            }
        }
        false
    }

    /// Moves `speed` cells along the path, drawing a fresh waypoint whenever
    /// the current path runs out. Holds position if no waypoint is reachable.
    pub fn advance(&mut self, grid: &OccupancyGrid) {
        let mut budget = self.speed;
        while budget > 0.0 {
            if self.cursor >= self.path.len() && !self.plan(grid) {
                return;
            }
            let next = center(self.path[self.cursor]);
            let gap = self.position.distance(next);
            if gap <= budget {
                self.position = next;
                self.cursor += 1;
                budget -= gap;
            } else {
                self.position = self.position + (next - self.position) * (budget / gap);
                budget = 0.0;
            }
        }
    }
}
