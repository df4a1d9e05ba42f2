use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Occupancy grid of unit cells. Cell `(x, y)` covers the closed square
/// `[x, x+1] x [y, y+1]`; anything outside the grid counts as occupied.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    obstacle_ratio: f64,
    seed: Option<u64>,
    cells: Vec<bool>,
}

/// On-disk form: `{width, height, obstacle_ratio, occupied: [[x,y],...], seed}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub width: usize,
    pub height: usize,
    pub obstacle_ratio: f64,
    pub occupied: Vec<[usize; 2]>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl OccupancyGrid {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            obstacle_ratio: 0.0,
            seed: None,
            cells: vec![false; width * height],
        }
    }

    /// Samples exactly `round(ratio * width * height)` distinct occupied cells,
    /// uniformly without replacement.
    pub fn generate<R: Rng + ?Sized>(width: usize, height: usize, ratio: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..1.0).contains(&ratio) {
            return Err(Error::Config(format!("obstacle ratio {ratio} outside [0, 1)")));
        }
        let n = width * height;
        let count = (ratio * n as f64).round() as usize;
        let mut grid = Self::empty(width, height);
        grid.obstacle_ratio = ratio;
        for idx in rand::seq::index::sample(rng, n, count) {
            grid.cells[idx] = true;
        }
        Ok(grid)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn obstacle_ratio(&self) -> f64 {
        self.obstacle_ratio
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn diagonal(&self) -> f64 {
        (self.width as f64).hypot(self.height as f64)
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    pub fn is_occupied(&self, x: i64, y: i64) -> bool {
        !self.in_bounds(x, y) || self.cells[y as usize * self.width + x as usize]
    }

    pub fn set_occupied(&mut self, x: usize, y: usize, occupied: bool) {
        assert!(x < self.width && y < self.height, "cell ({x}, {y}) out of bounds");
        self.cells[y * self.width + x] = occupied;
    }

    /// True when the point lies strictly inside the world and its cell is free.
    pub fn is_free_point(&self, p: Vec2) -> bool {
        let (x, y) = p.cell();
        p.x > 0.0 && p.y > 0.0 && !self.is_occupied(x, y)
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Occupied cells in row-major order.
    pub fn occupied_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(i, _)| (i % self.width, i / self.width))
    }

    /// Free cells in row-major order.
    pub fn free_cells(&self) -> Vec<(usize, usize)> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| (i % self.width, i / self.width))
            .collect()
    }

    pub fn to_file(&self) -> GridFile {
        GridFile {
            width: self.width,
            height: self.height,
            obstacle_ratio: self.obstacle_ratio,
            occupied: self.occupied_cells().map(|(x, y)| [x, y]).collect(),
            seed: self.seed,
        }
    }

    pub fn from_file(file: &GridFile) -> Result<Self> {
        let mut grid = Self::empty(file.width, file.height);
        grid.obstacle_ratio = file.obstacle_ratio;
        grid.seed = file.seed;
        for &[x, y] in &file.occupied {
            if x >= file.width || y >= file.height {
                return Err(Error::Config(format!("occupied cell [{x}, {y}] outside {}x{} grid", file.width, file.height)));
            }
            grid.cells[y * file.width + x] = true;
        }
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn generated_count_matches_ratio() {
        let g = OccupancyGrid::generate(100, 100, 0.20, &mut stream(1, &[], Stream::Instance)).unwrap();
        assert_eq!(g.occupied_count(), 2000);
        let g = OccupancyGrid::generate(100, 100, 0.0, &mut stream(1, &[], Stream::Instance)).unwrap();
        assert_eq!(g.occupied_count(), 0);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = OccupancyGrid::generate(20, 20, 0.30, &mut stream(9, &[], Stream::Instance)).unwrap();
        let b = OccupancyGrid::generate(20, 20, 0.30, &mut stream(9, &[], Stream::Instance)).unwrap();
        assert_eq!(a.occupied_count(), 120);
        assert_eq!(a, b);
        let c = OccupancyGrid::generate(20, 20, 0.30, &mut stream(10, &[], Stream::Instance)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_full_ratio() {
        assert!(OccupancyGrid::generate(5, 5, 1.0, &mut stream(0, &[], Stream::Instance)).is_err());
    }

    #[test]
    fn out_of_bounds_is_occupied() {
        let g = OccupancyGrid::empty(4, 4);
        assert!(g.is_occupied(-1, 0));
        assert!(g.is_occupied(0, 4));
        assert!(!g.is_occupied(3, 3));
    }

    #[test]
    fn file_round_trip() {
        let g = OccupancyGrid::generate(12, 9, 0.25, &mut stream(3, &[], Stream::Instance)).unwrap().with_seed(3);
        let json = serde_json::to_string(&g.to_file()).unwrap();
        let back: GridFile = serde_json::from_str(&json).unwrap();
        assert_eq!(OccupancyGrid::from_file(&back).unwrap(), g);
        assert!(json.contains("\"occupied\":[["));
    }
}
