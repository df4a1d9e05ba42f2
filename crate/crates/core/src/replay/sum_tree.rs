/// Complete binary tree over a power-of-two number of leaves. Each internal
/// node stores the sum of its children and, separately, their maximum.
#[derive(Clone, Debug)]
pub struct SumTree {
    leaves: usize,
    sums: Vec<f64>,
    maxes: Vec<f64>,
}

impl SumTree {
    pub fn new(capacity: usize) -> Self {
        let leaves = capacity.max(1).next_power_of_two();
        Self { leaves, sums: vec![0.0; 2 * leaves], maxes: vec![0.0; 2 * leaves] }
    }

    pub fn leaves(&self) -> usize {
        self.leaves
    }

    pub fn total(&self) -> f64 {
        self.sums[1]
    }

    pub fn max(&self) -> f64 {
        self.maxes[1]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.sums[self.leaves + i]
    }

    /// Sets leaf `i` and recomputes its ancestors from their children, so
    /// every internal node is exactly the sum of the two below it.
    pub fn set(&mut self, i: usize, value: f64) {
        let mut n = self.leaves + i;
        self.sums[n] = value;
        self.maxes[n] = value;
        while n > 1 {
            n /= 2;
            self.sums[n] = self.sums[2 * n] + self.sums[2 * n + 1];
            self.maxes[n] = self.maxes[2 * n].max(self.maxes[2 * n + 1]);
        }
    }

    /// Leaf whose cumulative interval contains `u`. Never lands on a
    /// zero-priority leaf while the total is positive.
    pub fn find(&self, mut u: f64) -> usize {
        let mut n = 1;
        while n < self.leaves {
            let (l, r) = (2 * n, 2 * n + 1);
            if u < self.sums[l] || self.sums[r] <= 0.0 {
                n = l;
            } else {
                u -= self.sums[l];
                n = r;
            }
        }
        n - self.leaves
    }

    /// Largest deviation between an internal node and the sum of its children.
    pub fn max_inconsistency(&self) -> f64 {
        (1..self.leaves).map(|n| (self.sums[n] - (self.sums[2 * n] + self.sums[2 * n + 1])).abs()).fold(0.0, f64::max)
    }
}
