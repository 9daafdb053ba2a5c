use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heisenlab::contact::{
    injectivity_collision_search_with, nn_distance_percentile_with, rank_report_with, RankOptions,
};
use heisenlab::extension::{extend_interval_with, Domain, ExtensionOptions, Knot, PartialCurveData};
use heisenlab::generators::{isotropic_lift_map, quadratic_contact_map};
use heisenlab::measure::{greedy_covering, CloudMetric, PointCloud};
use heisenlab::{Exec, HPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn rank(c: &mut Criterion) {
    let m = quadratic_contact_map(3, 2, 33, 1).unwrap();
    let opts = RankOptions::for_map(&m);
    let mut g = c.benchmark_group("rank_report_k3_33");
    for (name, exec) in STRATEGIES {
        g.bench_function(name, |b| b.iter(|| rank_report_with(black_box(&m), &opts, exec)));
    }
    g.finish();
}

fn collisions(c: &mut Criterion) {
    let m = isotropic_lift_map(2, 1, 1, 129, 2).unwrap();
    let eps = nn_distance_percentile_with(&m, 0.01, Exec::Parallel).unwrap();
    let delta = 10.0 * m.max_spacing();
    let mut g = c.benchmark_group("collisions_k2_129");
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::new("search", name), |b| {
            b.iter(|| injectivity_collision_search_with(black_box(&m), eps, delta, exec))
        });
        g.bench_function(BenchmarkId::new("nn_percentile", name), |b| {
            b.iter(|| nn_distance_percentile_with(black_box(&m), 0.01, exec))
        });
    }
    g.finish();
}

fn covering(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts: Vec<HPoint> = (0..4000)
        .map(|_| HPoint::new(vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)], 0.0).unwrap())
        .collect();
    let cloud = PointCloud::new(&pts, CloudMetric::Koranyi).unwrap();
    let mut g = c.benchmark_group("greedy_covering_4000");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_function(name, |b| b.iter(|| greedy_covering(black_box(&cloud), 2.0, 0.1, exec)));
    }
    g.finish();
}

fn extension(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let knots: Vec<Knot> = (0..16)
        .map(|i| Knot {
            param: i as f64 / 16.0,
            value: HPoint::from_coords(&(0..5).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>())
                .unwrap(),
        })
        .collect();
    let mut data = PartialCurveData::new(Domain::Interval { a: 0.0, b: 1.0 }, knots, 0.0).unwrap();
    data.lipschitz = data.knot_lipschitz().unwrap().0;
    let opts = ExtensionOptions::default();
    let e = extend_interval_with(&data, &opts, Exec::Parallel).unwrap();
    let mut g = c.benchmark_group("extension_16_knots");
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::new("build", name), |b| {
            b.iter(|| extend_interval_with(black_box(&data), &opts, exec))
        });
        g.bench_function(BenchmarkId::new("measured_lipschitz", name), |b| {
            b.iter(|| e.measured_lipschitz(2000, 0, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, rank, collisions, covering, extension);
criterion_main!(benches);
