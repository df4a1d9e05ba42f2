use std::f64::consts::TAU;

use super::OccupancyGrid;
use crate::error::{Error, Result};
use crate::geom::Vec2;

pub const N_BEAMS: usize = 36;
pub const R_MAX: f64 = 10.0;

/// World-frame bearing of beam `i`: `2 pi i / 36`.
pub fn beam_bearing(i: usize) -> f64 {
    TAU * i as f64 / N_BEAMS as f64
}

/// One 36-beam range scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lidar(pub [f64; N_BEAMS]);

impl Lidar {
    pub fn uniform(range: f64) -> Self {
        Lidar([range; N_BEAMS])
    }

    pub fn ranges(&self) -> &[f64; N_BEAMS] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index of the smallest range, lowest index on ties.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for i in 1..N_BEAMS {
            if self.0[i] < self.0[best] {
                best = i;
            }
        }
        best
    }
}

fn axis_step(d: f64) -> i64 {
    if d > 0.0 {
        1
    } else if d < 0.0 {
        -1
    } else {
        0
    }
}

/// Distance along the ray to the next cell boundary on one axis.
fn boundary_t(cell: i64, origin: f64, d: f64) -> f64 {
    if d > 0.0 {
        ((cell + 1) as f64 - origin) / d
    } else if d < 0.0 {
        (cell as f64 - origin) / d
    } else {
        f64::INFINITY
    }
}

/// Exact grid traversal from `origin` along `heading`. Returns the distance to
/// the first occupied cell boundary (world walls included) if it is within
/// `limit`, otherwise `None`. Occupied cells are closed squares, so grazing an
/// edge or corner counts as a hit.
pub fn first_hit(grid: &OccupancyGrid, origin: Vec2, heading: f64, limit: f64) -> Result<Option<f64>> {
    let (mut cx, mut cy) = origin.cell();
    if grid.is_occupied(cx, cy) {
        return Err(Error::InsideObstacle { x: origin.x, y: origin.y });
    }
    let (dx, dy) = (heading.cos(), heading.sin());
    let (sx, sy) = (axis_step(dx), axis_step(dy));
    // A ray running exactly along a grid line touches the cells on both sides.
    let graze_x = dx == 0.0 && origin.x.fract() == 0.0;
    let graze_y = dy == 0.0 && origin.y.fract() == 0.0;
    let blocked = |x: i64, y: i64| {
        grid.is_occupied(x, y) || (graze_x && grid.is_occupied(x - 1, y)) || (graze_y && grid.is_occupied(x, y - 1))
    };
    if blocked(cx, cy) {
        return Ok(Some(0.0));
    }
    loop {
        let tx = boundary_t(cx, origin.x, dx);
        let ty = boundary_t(cy, origin.y, dy);
        let t = tx.min(ty).max(0.0);
        if t > limit {
            return Ok(None);
        }
        if tx < ty {
            cx += sx;
            if blocked(cx, cy) {
                return Ok(Some(t));
            }
        } else if ty < tx {
            cy += sy;
            if blocked(cx, cy) {
                return Ok(Some(t));
            }
        } else {
            // Passing exactly through a corner touches all three neighbours.
            if blocked(cx + sx, cy) || blocked(cx, cy + sy) || blocked(cx + sx, cy + sy) {
                return Ok(Some(t));
            }
            cx += sx;
            cy += sy;
        }
    }
}

/// 36-beam scan from `position`, each range capped at `R_MAX`.
pub fn raycast(grid: &OccupancyGrid, position: Vec2) -> Result<Lidar> {
    let mut ranges = [R_MAX; N_BEAMS];
    for (i, r) in ranges.iter_mut().enumerate() {
        if let Some(t) = first_hit(grid, position, beam_bearing(i), R_MAX)? {
            *r = t.min(R_MAX);
        }
    }
    Ok(Lidar(ranges))
}

/// True when the closed segment `a`-`b` touches no occupied cell and stays
/// inside the world.
pub fn segment_is_clear(grid: &OccupancyGrid, a: Vec2, b: Vec2) -> bool {
    let len = a.distance(b);
    match first_hit(grid, a, a.bearing_to(b), len) {
        Ok(hit) => hit.is_none(),
        Err(_) => false,
    }
}
