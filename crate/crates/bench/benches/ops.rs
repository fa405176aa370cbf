use std::hint::black_box;

use concgraph::baselines::{CoarseLockGraph, SequentialGraph};
use concgraph::{Flavor, GraphOps};
use concgraph_bench::{acyclic, key, plain, seeded};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn lookups(c: &mut Criterion) {
    let mut group = c.benchmark_group("contains_vertex");
    for n in [100u32, 1000] {
        let g = plain(n, 0.0);
        let coarse = seeded(CoarseLockGraph::new(Flavor::Plain), n, 0.0);
        let mut i = 0;
        group.bench_with_input(BenchmarkId::new("concurrent", n), &n, |b, &n| {
            b.iter(|| {
                i = i % n as i64 + 1;
                black_box(g.contains_vertex(key(i)))
            })
        });
        group.bench_with_input(BenchmarkId::new("coarse", n), &n, |b, &n| {
            b.iter(|| {
                i = i % n as i64 + 1;
                black_box(coarse.contains_vertex(key(i)))
            })
        });
    }
    group.finish();

    let g = plain(200, 0.5);
    c.bench_function("contains_edge/200@0.5", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 7) % 200;
            black_box(g.contains_edge(key(i / 2 + 1), key(i + 1)))
        })
    });
}

fn edge_updates(c: &mut Criterion) {
    let mut group = c.benchmark_group("edge_toggle");
    let g = plain(500, 0.0);
    group.bench_function("plain", |b| {
        b.iter(|| {
            g.add_edge(key(1), key(250));
            g.remove_edge(key(1), key(250))
        })
    });
    // a fresh edge out of a sink: the cycle check has nothing to explore
    let a = acyclic(500, 0.0);
    group.bench_function("acyclic_sink", |b| {
        b.iter(|| {
            a.add_edge(key(1), key(250));
            a.remove_edge(key(1), key(250))
        })
    });
    let s = seeded(SequentialGraph::new(Flavor::Acyclic), 500, 0.0);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            s.add_edge(key(1), key(250));
            s.remove_edge(key(1), key(250))
        })
    });
    group.finish();
}

fn reachability(c: &mut Criterion) {
    let mut group = c.benchmark_group("path_exists");
    for n in [50u32, 200] {
        let g = acyclic(n, 0.2);
        group.bench_with_input(BenchmarkId::new("forward", n), &n, |b, &n| {
            b.iter(|| black_box(g.path_exists(key(1), key(n as i64))))
        });
        // the reverse direction explores everything reachable and fails
        group.bench_with_input(BenchmarkId::new("rejected_cycle", n), &n, |b, &n| {
            b.iter(|| black_box(g.acyclic_add_edge(key(n as i64), key(1))))
        });
    }
    group.finish();
}

criterion_group!(benches, lookups, edge_updates, reachability);
criterion_main!(benches);
