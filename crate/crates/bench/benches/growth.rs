use apollonian_core::generator::{GraphState, Model, QSchedule};
use apollonian_core::metrics;
use apollonian_core::rng::rng_from_seed;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn ran_growth(c: &mut Criterion) {
    let mut group = c.benchmark_group("ran_growth");
    for (d, n) in [(2u8, 10_000u32), (2, 100_000), (3, 100_000)] {
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), n), &n, |b, &n| {
            b.iter(|| {
                let mut g = GraphState::new(d, Model::Ran).unwrap();
                g.grow(n, None, &mut rng_from_seed(1)).unwrap();
                g.vertex_count()
            })
        });
    }
    group.finish();
}

fn ean_growth(c: &mut Criterion) {
    let schedule = QSchedule::Constant { q: 0.5 };
    c.bench_function("ean_growth/d2_q0.5_12steps", |b| {
        b.iter(|| {
            let mut g = GraphState::new(2, Model::Ean).unwrap();
            g.grow(12, Some(&schedule), &mut rng_from_seed(1)).unwrap();
            g.vertex_count()
        })
    });
}

fn graph_metrics(c: &mut Criterion) {
    let mut g = GraphState::new(2, Model::Ran).unwrap();
    g.grow(20_000, None, &mut rng_from_seed(3)).unwrap();
    c.bench_function("degree_histogram/20k", |b| b.iter(|| metrics::degree_histogram(&g)));
    c.bench_function("local_clustering/20k", |b| b.iter(|| metrics::local_clustering(&g)));
    c.bench_function("bfs_from/20k", |b| b.iter(|| metrics::bfs_from(g.adjacency(), 0)));
}

criterion_group!(benches, ran_growth, ean_growth, graph_metrics);
criterion_main!(benches);
