//! Parallel against sequential execution of the heavy kernels.
//!
//! With the default `parallel` feature every kernel is timed on the global
//! rayon pool and on a one-thread pool. Built with `--no-default-features`
//! only the sequential fallback is timed.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wallkit::dynamics::{build_axis, certify_contracting, projection_profile, DEFAULT_POWER_BUDGET};
use wallkit::fixtures;
use wallkit::walls::build_hyperplanes;

const RADIUS: u32 = 10;

#[cfg(feature = "parallel")]
fn modes() -> Vec<(&'static str, Option<rayon::ThreadPool>)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    vec![("rayon", None), ("one-thread", Some(one))]
}

#[cfg(not(feature = "parallel"))]
fn modes() -> Vec<(&'static str, Option<()>)> {
    vec![("sequential", None)]
}

#[cfg(feature = "parallel")]
fn within<R: Send>(pool: &Option<rayon::ThreadPool>, f: impl FnOnce() -> R + Send) -> R {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn within<R>(_: &Option<()>, f: impl FnOnce() -> R) -> R {
    f()
}

fn kernels(c: &mut Criterion) {
    let sys = fixtures::triangle_237();
    let ball = sys.cayley_ball(RADIUS).unwrap();
    let walls = build_hyperplanes(&ball.graph);
    let h = sys.parse_word("abc").unwrap();
    let axis = build_axis(&sys, &ball, &h, DEFAULT_POWER_BUDGET).unwrap();

    let mut group = c.benchmark_group("kernels-237-r10");
    group.sample_size(10);
    for (mode, pool) in modes() {
        group.bench_function(BenchmarkId::new("cayley_ball", mode), |b| {
            b.iter(|| within(&pool, || sys.cayley_ball(RADIUS).unwrap()))
        });
        group.bench_function(BenchmarkId::new("build_hyperplanes", mode), |b| {
            b.iter(|| within(&pool, || build_hyperplanes(&ball.graph)))
        });
        group.bench_function(BenchmarkId::new("projection_profile", mode), |b| {
            b.iter(|| within(&pool, || projection_profile(&ball.graph, &axis)))
        });
        group.bench_function(BenchmarkId::new("certify_contracting", mode), |b| {
            b.iter(|| within(&pool, || certify_contracting(&sys, &ball, &walls, &h).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
