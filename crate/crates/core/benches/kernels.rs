//! Sequential versus rayon execution of the heavy kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stabvote_core::electoral::{self, EcScenario};
use stabvote_core::geometry::{self, SubsetMask};
use stabvote_core::stability::{self, CorruptionModel, McConfig};
use stabvote_core::{power, BooleanFunction, Exec, Method};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn random_table(n: usize) -> BooleanFunction {
    BooleanFunction::random(n, &mut ChaCha8Rng::seed_from_u64(n as u64))
}

fn noise_operator(c: &mut Criterion) {
    let mut g = c.benchmark_group("noise_operator");
    g.sample_size(10);
    let model = CorruptionModel::uniform(0.6).unwrap();
    for n in [16, 20] {
        let f = random_table(n);
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &f, |b, f| {
                b.iter(|| stability::stability_exact_with(f, &model, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn pivotal(c: &mut Criterion) {
    let mut g = c.benchmark_group("pivotal_counts");
    g.sample_size(10);
    for n in [16, 22] {
        let f = random_table(n);
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &f, |b, f| {
                b.iter(|| power::pivotal_counts_with(f, exec))
            });
        }
    }
    g.finish();
}

fn dilation(c: &mut Criterion) {
    let mut g = c.benchmark_group("neighborhood");
    g.sample_size(10);
    for n in [16, 20] {
        let s = SubsetMask::from_indices(n, [0, (1u64 << n) - 1, 12345 % (1u64 << n)]).unwrap();
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &s, |b, s| {
                b.iter(|| geometry::neighborhood_with(s, 3, exec).unwrap())
            });
        }
        let f = random_table(n);
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(format!("vulnerable_{name}"), n), &f, |b, f| {
                b.iter(|| geometry::vulnerable_count_with(f, 2, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    let maj = Method::majority(10001).unwrap();
    let model = CorruptionModel::uniform(0.5).unwrap();
    let states = electoral::equal_states(51, 10001, 1).unwrap();
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new("majority_10001", name), |b| {
            b.iter(|| stability::stability_mc(&maj, &model, &McConfig::new(100_000, 1).with_exec(exec)).unwrap())
        });
        let scenario = EcScenario::new(states.clone(), 1e-4, 20_000, 1).unwrap().with_exec(exec);
        g.bench_function(BenchmarkId::new("electoral_51x10001", name), |b| {
            b.iter(|| electoral::compare_ec_vs_majority(&scenario))
        });
    }
    g.finish();
}

criterion_group!(benches, noise_operator, pivotal, dilation, monte_carlo);
criterion_main!(benches);
