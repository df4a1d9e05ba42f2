use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rulecoach::geom::Vec2;
use rulecoach::learners::{Batch, DqnLearner, LearnerConfig, SacLearner, FEATURE_DIM};
use rulecoach::nn::Mlp;
use rulecoach::replay::{PriorityParams, ReplayBuffer, ReplayMeta, ReplayMode, StoredAction, TransitionRecord};
use rulecoach::rng::{stream, Stream};
use rulecoach::advisor::Regime;
use rulecoach::world::{raycast, OccupancyGrid};

fn batch(n: usize) -> Batch {
    Batch {
        n,
        dim: FEATURE_DIM,
        s: (0..n * FEATURE_DIM).map(|i| (i as f64 * 0.37).sin()).collect(),
        s_next: (0..n * FEATURE_DIM).map(|i| (i as f64 * 0.41).cos()).collect(),
        r: (0..n).map(|i| (i % 7) as f64 - 3.0).collect(),
        done: (0..n).map(|i| i % 17 == 0).collect(),
        discrete: (0..n).map(|i| i % 20).collect(),
        continuous: (0..n * 2).map(|i| (i as f64 * 0.13).sin()).collect(),
    }
}

fn bench_raycast(c: &mut Criterion) {
    let grid = OccupancyGrid::generate(100, 100, 0.2, &mut stream(1, &[], Stream::Instance)).unwrap();
    let free: Vec<Vec2> = grid.free_cells().iter().take(256).map(|&(x, y)| Vec2::new(x as f64 + 0.5, y as f64 + 0.5)).collect();
    c.bench_function("raycast_36_beams", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % free.len();
            black_box(raycast(&grid, free[i]).unwrap())
        })
    });
}

fn bench_replay(c: &mut Criterion) {
    let mut buf = ReplayBuffer::new(ReplayMode::ModeAware, 100_000, PriorityParams::default(), 2.0);
    for i in 0..100_000usize {
        buf.push(TransitionRecord {
            s: vec![0.0; FEATURE_DIM],
            g: Vec2::new(0.0, 0.0),
            a: StoredAction::Discrete(i % 20),
            r: 0.0,
            s_next: vec![0.0; FEATURE_DIM],
            g_next: Vec2::new(0.0, 0.0),
            done: false,
            meta: ReplayMeta { regime: Regime::Nominal, d_min: (i % 9) as f64, in_rec: i % 2 == 0, in_avoid: false },
        });
    }
    let mut rng = stream(2, &[], Stream::Replay);
    c.bench_function("replay_sample_256_of_100k", |b| b.iter(|| black_box(buf.sample(256, 0.4, &mut rng).unwrap().indices.len())));
}

fn bench_mlp(c: &mut Criterion) {
    let net = Mlp::new(&[FEATURE_DIM, 256, 256, 20], &mut stream(3, &[], Stream::Init));
    let x = batch(256).s;
    c.bench_function("mlp_forward_256", |b| b.iter(|| black_box(net.forward(&x, 256).unwrap())));
    let fwd = net.forward(&x, 256).unwrap();
    let dout = vec![1e-3; 256 * 20];
    c.bench_function("mlp_backward_256", |b| b.iter(|| black_box(net.backward(&fwd, &dout))));
}

fn bench_updates(c: &mut Criterion) {
    let b256 = batch(256);
    let w = vec![1.0; 256];
    let mut rng = stream(4, &[], Stream::Update);
    let mut dqn = DqnLearner::new(FEATURE_DIM, LearnerConfig::default(), &mut stream(5, &[], Stream::Init));
    let mut sac = SacLearner::new(FEATURE_DIM, LearnerConfig::default(), &mut stream(5, &[], Stream::Init));
    let mut g = c.benchmark_group("updates");
    g.sample_size(20);
    g.bench_function("dqn_update_256", |b| b.iter(|| black_box(dqn.update(&b256, &w).unwrap())));
    g.bench_function("sac_update_256", |b| b.iter(|| black_box(sac.update(&b256, &w, &mut rng).unwrap())));
    g.finish();
}

criterion_group!(benches, bench_raycast, bench_replay, bench_mlp, bench_updates);
criterion_main!(benches);
