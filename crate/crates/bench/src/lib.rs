//! Criterion benchmarks for the simulator and learner hot paths live in
//! `benches/`. Run them with `cargo bench -p rulecoach-bench`.
