//! Whole-workload runs at a fixed operation count, one group per preset.

use std::time::Duration;

use concgraph::workload::{build_graph, run_on, seed_initial_graph, Preset, Variant, WorkloadSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const OPS_PER_THREAD: u64 = 20_000;

fn spec(preset: Preset, variant: Variant, threads: usize) -> WorkloadSpec {
    let mut s = WorkloadSpec::new(preset);
    s.variant = variant;
    s.threads = threads;
    s.key_range = 500;
    s.initial.vertices = 500;
    s.duration = Duration::ZERO;
    s.ops_per_thread = Some(OPS_PER_THREAD);
    s
}

fn presets(c: &mut Criterion) {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(4);
    for preset in Preset::ALL {
        let mut group = c.benchmark_group(format!("workload/{}", preset.name()));
        group.sample_size(10);
        for variant in Variant::ALL {
            let s = spec(preset, variant, threads);
            group.throughput(Throughput::Elements(OPS_PER_THREAD * s.effective_threads() as u64));
            group.bench_function(BenchmarkId::new(variant.name(), s.effective_threads()), |b| {
                b.iter_custom(|iters| {
                    let mut total = Duration::ZERO;
                    for i in 0..iters {
                        let g = build_graph(variant, false);
                        seed_initial_graph(g.ops(), s.initial, i);
                        // the run's own clock leaves out seeding and cleanup
                        total += run_on(&g, &s, i as u32, None).expect("valid spec").elapsed;
                    }
                    total
                })
            });
        }
        group.finish();
    }
}

criterion_group!(benches, presets);
criterion_main!(benches);
