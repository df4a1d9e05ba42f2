use rand::Rng;
use serde::{Deserialize, Serialize};

use super::priority::{compute_priority, PriorityParams, ReplayMeta};
use super::sum_tree::SumTree;
use crate::advisor::Regime;
use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Stored action: a discrete index or a normalized continuous pair in [-1, 1]^2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StoredAction {
    Discrete(usize),
    Continuous([f64; 2]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionRecord {
    pub s: Vec<f64>,
    pub g: Vec2,
    pub a: StoredAction,
    pub r: f64,
    pub s_next: Vec<f64>,
    pub g_next: Vec2,
    pub done: bool,
    pub meta: ReplayMeta,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplayMode {
    #[default]
    ModeAware,
    Uniform,
}

/// Slot plus the insertion id it held when sampled, so updates to a slot
/// that has since been overwritten can be recognized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleIndex {
    pub slot: usize,
    pub id: u64,
}

#[derive(Debug)]
pub struct Sample<'a> {
    pub records: Vec<&'a TransitionRecord>,
    pub indices: Vec<SampleIndex>,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BufferStats {
    pub size: usize,
    pub capacity: usize,
    pub mode: ReplayMode,
    pub total_priority: f64,
    pub max_priority: f64,
    /// Counts over ten equal-width bins spanning `[0, max_priority]`.
    pub priority_histogram: Vec<usize>,
    pub regime_counts: RegimeCounts,
    pub in_rec: usize,
    pub in_avoid: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegimeCounts {
    pub emg: usize,
    pub obs: usize,
    pub nom: usize,
}

/// Ring buffer of transitions with optional mode-aware prioritized sampling.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    mode: ReplayMode,
    capacity: usize,
    params: PriorityParams,
    r_avoid: f64,
    records: Vec<TransitionRecord>,
    ids: Vec<u64>,
    tree: SumTree,
    cursor: usize,
    pushed: u64,
}

impl ReplayBuffer {
    pub fn new(mode: ReplayMode, capacity: usize, params: PriorityParams, r_avoid: f64) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        // The tree is sized lazily; a million-slot buffer in a short run
        // would otherwise cost tens of megabytes up front.
        Self {
            mode,
            capacity,
            params,
            r_avoid,
            records: Vec::new(),
            ids: Vec::new(),
            tree: SumTree::new(capacity.min(1024)),
            cursor: 0,
            pushed: 0,
        }
    }

    pub fn mode(&self) -> ReplayMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, slot: usize) -> &TransitionRecord {
        &self.records[slot]
    }

    pub fn priority(&self, slot: usize) -> f64 {
        self.tree.get(slot)
    }

    pub fn total_priority(&self) -> f64 {
        self.tree.total()
    }

    pub fn max_priority(&self) -> f64 {
        self.tree.max()
    }

    pub fn tree(&self) -> &SumTree {
        &self.tree
    }

    fn grow_tree(&mut self, slot: usize) {
        if slot < self.tree.leaves() {
            return;
        }
        let mut t = SumTree::new((slot + 1).next_power_of_two().min(self.capacity.next_power_of_two()));
        for i in 0..self.records.len() {
            t.set(i, self.tree.get(i));
        }
        self.tree = t;
    }

    /// Inserts at the current maximum priority (1.0 when empty), overwriting
    /// the oldest record once full.
    pub fn push(&mut self, record: TransitionRecord) {
        let p = if self.is_empty() { 1.0 } else { self.tree.max() };
        let slot = self.cursor;
        self.grow_tree(slot);
        if slot == self.records.len() {
            self.records.push(record);
            self.ids.push(self.pushed);
        } else {
            self.records[slot] = record;
            self.ids[slot] = self.pushed;
        }
        self.tree.set(slot, p);
        self.pushed += 1;
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    /// Draws `n` records. Mode-aware: one draw per equal stratum of the
    /// priority mass, weights `(N P(i))^-beta` over the batch max. Uniform:
    /// uniform draws with unit weights.
    pub fn sample<'a, R: Rng + ?Sized>(&'a self, n: usize, beta: f64, rng: &mut R) -> Result<Sample<'a>> {
        if n == 0 || self.len() < n {
            return Err(Error::InsufficientRecords { have: self.len(), need: n.max(1) });
        }
        let slots: Vec<usize> = match self.mode {
            ReplayMode::Uniform => (0..n).map(|_| rng.random_range(0..self.len())).collect(),
            ReplayMode::ModeAware => {
                let total = self.tree.total();
                let seg = total / n as f64;
                (0..n).map(|i| self.tree.find((i as f64 + rng.random::<f64>()) * seg).min(self.len() - 1)).collect()
            }
        };
        let weights = match self.mode {
            ReplayMode::Uniform => vec![1.0; n],
            ReplayMode::ModeAware => {
                let total = self.tree.total();
                let len = self.len() as f64;
                let raw: Vec<f64> = slots.iter().map(|&s| (len * self.tree.get(s) / total).powf(-beta)).collect();
                let max = raw.iter().cloned().fold(0.0, f64::max);
                raw.iter().map(|w| w / max).collect()
            }
        };
        Ok(Sample {
            records: slots.iter().map(|&s| &self.records[s]).collect(),
            indices: slots.iter().map(|&s| SampleIndex { slot: s, id: self.ids[s] }).collect(),
            weights,
        })
    }

    /// Recomputes priorities from fresh TD errors using each record's stored
    /// metadata. Entries whose slot has been overwritten are skipped. A no-op
    /// under uniform replay.
    pub fn update_priorities(&mut self, indices: &[SampleIndex], td_errors: &[f64]) {
        if self.mode == ReplayMode::Uniform {
            return;
        }
        for (ix, &td) in indices.iter().zip(td_errors) {
            if ix.slot >= self.records.len() || self.ids[ix.slot] != ix.id {
                continue;
            }
            let p = compute_priority(td, &self.records[ix.slot].meta, self.r_avoid, &self.params);
            self.tree.set(ix.slot, p);
        }
    }

    pub fn stats(&self) -> BufferStats {
        let max = self.tree.max();
        let mut hist = vec![0usize; 10];
        let mut regimes = RegimeCounts::default();
        let (mut in_rec, mut in_avoid) = (0, 0);
        for (i, r) in self.records.iter().enumerate() {
            if max > 0.0 {
                let b = ((self.tree.get(i) / max) * 10.0) as usize;
                hist[b.min(9)] += 1;
            }
            match r.meta.regime {
                Regime::Emergency => regimes.emg += 1,
                Regime::Avoidance => regimes.obs += 1,
                Regime::Nominal => regimes.nom += 1,
            }
            in_rec += usize::from(r.meta.in_rec);
            in_avoid += usize::from(r.meta.in_avoid);
        }
        BufferStats {
            size: self.len(),
            capacity: self.capacity,
            mode: self.mode,
            total_priority: self.tree.total(),
            max_priority: max,
            priority_histogram: hist,
            regime_counts: regimes,
            in_rec,
            in_avoid,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use proptest::prelude::*;

    fn rec(tag: f64, regime: Regime) -> TransitionRecord {
        TransitionRecord {
            s: vec![tag],
            g: Vec2::new(0.0, 0.0),
            a: StoredAction::Discrete(0),
            r: tag,
            s_next: vec![tag],
            g_next: Vec2::new(0.0, 0.0),
            done: false,
            meta: ReplayMeta { regime, d_min: 5.0, in_rec: true, in_avoid: false },
        }
    }

    fn buffer(cap: usize) -> ReplayBuffer {
        ReplayBuffer::new(ReplayMode::ModeAware, cap, PriorityParams::default(), 2.0)
    }

    #[test]
    fn first_push_has_unit_priority_and_root_grows() {
        let mut b = buffer(8);
        b.push(rec(0.0, Regime::Nominal));
        assert_eq!(b.priority(0), 1.0);
        b.tree.set(0, 3.0);
        b.push(rec(1.0, Regime::Nominal));
        assert_eq!(b.priority(1), 3.0);
        assert_eq!(b.total_priority(), 6.0);
    }

    #[test]
    fn ring_overwrites_oldest() {
        let mut b = buffer(2);
        for t in 0..3 {
            b.push(rec(t as f64, Regime::Nominal));
        }
        assert_eq!(b.len(), 2);
        assert_eq!(b.get(0).r, 2.0);
        assert_eq!(b.get(1).r, 1.0);
    }

    #[test]
    fn insufficient_records_refused() {
        let mut b = buffer(8);
        b.push(rec(0.0, Regime::Nominal));
        let mut rng = stream(0, &[], Stream::Replay);
        assert!(matches!(b.sample(2, 0.4, &mut rng), Err(Error::InsufficientRecords { have: 1, need: 2 })));
    }

    #[test]
    fn equal_priorities_give_unit_weights() {
        let mut b = buffer(16);
        for t in 0..10 {
            b.push(rec(t as f64, Regime::Nominal));
        }
        let mut rng = stream(0, &[], Stream::Replay);
        for beta in [0.4, 1.0] {
            let s = b.sample(5, beta, &mut rng).unwrap();
            assert!(s.weights.iter().all(|&w| w == 1.0));
        }
    }

    #[test]
    fn sampling_frequencies_follow_priorities() {
        let mut b = buffer(2);
        b.push(rec(0.0, Regime::Nominal));
        b.push(rec(1.0, Regime::Nominal));
        b.tree.set(0, 3.0);
        b.tree.set(1, 1.0);
        let mut rng = stream(1, &[], Stream::Replay);
        let mut hits = 0usize;
        let draws = 100_000;
        for _ in 0..draws {
            let s = b.sample(1, 1.0, &mut rng).unwrap();
            hits += usize::from(s.indices[0].slot == 0);
        }
        assert!((hits as f64 / draws as f64 - 0.75).abs() < 0.01);
        // beta = 1: raw weights (2 * 0.75)^-1, (2 * 0.25)^-1 = 2/3, 2; normalized 1/3, 1.
        let s = b.sample(2, 1.0, &mut rng).unwrap();
        assert_eq!(s.indices[0].slot, 0);
        assert_eq!(s.indices[1].slot, 1);
        assert!((s.weights[0] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.weights[1], 1.0);
    }

    #[test]
    fn stale_updates_are_skipped() {
        let mut b = buffer(2);
        b.push(rec(0.0, Regime::Nominal));
        b.push(rec(1.0, Regime::Nominal));
        let mut rng = stream(1, &[], Stream::Replay);
        let s = b.sample(2, 1.0, &mut rng).unwrap();
        let idx = s.indices.clone();
        b.push(rec(2.0, Regime::Nominal));
        b.update_priorities(&idx, &[0.0, 0.0]);
        let fresh = idx.iter().find(|i| i.slot == 1).is_some();
        assert_eq!(b.priority(0), 1.0);
        if fresh {
            assert!(b.priority(1) < 1e-3);
        }
    }

    #[test]
    fn update_reuses_stored_meta() {
        let mut b = buffer(4);
        b.push(rec(0.0, Regime::Emergency));
        let idx = [SampleIndex { slot: 0, id: 0 }];
        b.update_priorities(&idx, &[0.0]);
        let floor = 1e-6f64.powf(0.6) * 1.5;
        assert!((b.priority(0) - floor).abs() < 1e-15);
        let before = b.priority(0);
        b.update_priorities(&idx, &[0.0]);
        assert_eq!(b.priority(0), before);
    }

    #[test]
    fn uniform_mode_ignores_priorities() {
        let mut b = ReplayBuffer::new(ReplayMode::Uniform, 4, PriorityParams::default(), 2.0);
        for t in 0..4 {
            b.push(rec(t as f64, Regime::Emergency));
        }
        let mut rng = stream(1, &[], Stream::Replay);
        let s = b.sample(4, 0.4, &mut rng).unwrap();
        assert!(s.weights.iter().all(|&w| w == 1.0));
        let idx = s.indices.clone();
        b.update_priorities(&idx, &[5.0; 4]);
        assert!((0..4).all(|i| b.priority(i) == 1.0));
    }

    #[test]
    fn tree_grows_past_initial_allocation() {
        let mut b = buffer(5000);
        for t in 0..3000 {
            b.push(rec(t as f64, Regime::Nominal));
        }
        assert_eq!(b.total_priority(), 3000.0);
        assert_eq!(b.stats().size, 3000);
        assert_eq!(b.stats().regime_counts.nom, 3000);
    }

    proptest! {
        #[test]
        fn root_consistent_under_push_and_update(ops in prop::collection::vec((any::<bool>(), 0usize..32, 0.0f64..4.0), 1..400)) {
            let mut b = buffer(24);
            let mut rng = stream(2, &[], Stream::Replay);
            for (is_push, k, td) in ops {
                if is_push || b.len() < 2 {
                    b.push(rec(td, if k % 3 == 0 { Regime::Emergency } else { Regime::Nominal }));
                } else {
                    let s = b.sample(2, 0.5, &mut rng).unwrap();
                    let idx = s.indices.clone();
                    b.update_priorities(&idx, &[td, td * 0.5]);
                }
                let direct: f64 = (0..b.len()).map(|i| b.priority(i)).sum();
                prop_assert!((b.total_priority() - direct).abs() < 1e-9);
                prop_assert!((0..b.len()).all(|i| b.priority(i) > 0.0));
            }
        }
    }
}
