use crate::replay::{StoredAction, TransitionRecord};

/// Column-oriented view of sampled transitions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Batch {
    pub n: usize,
    pub dim: usize,
    pub s: Vec<f64>,
    pub s_next: Vec<f64>,
    pub r: Vec<f64>,
    pub done: Vec<bool>,
    pub discrete: Vec<usize>,
    /// Normalized continuous actions, row-major `n x 2`.
    pub continuous: Vec<f64>,
}

impl Batch {
    pub fn from_records(records: &[&TransitionRecord]) -> Self {
        let n = records.len();
        let dim = records.first().map_or(0, |r| r.s.len());
        let mut b = Batch { n, dim, ..Default::default() };
        for rec in records {
            assert_eq!(rec.s.len(), dim, "mixed feature widths in batch");
            b.s.extend_from_slice(&rec.s);
            b.s_next.extend_from_slice(&rec.s_next);
            b.r.push(rec.r);
            b.done.push(rec.done);
            match rec.a {
                StoredAction::Discrete(i) => b.discrete.push(i),
                StoredAction::Continuous(a) => b.continuous.extend_from_slice(&a),
            }
        }
        b
    }
}
