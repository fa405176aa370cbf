use std::thread;
use std::time::{Duration, Instant};

use crossbeam_epoch as epoch;
use parking_lot::RwLock;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::keys::{KeySpace, OpStream};
use super::{InitialGraph, OpKind, SpecError, Variant, WorkloadSpec};
use crate::acyclic::AcyclicGraph;
use crate::baselines::{oracle_cycle_check, CoarseLockGraph, SequentialGraph};
use crate::graph::{ConcGraph, GraphConfig};
use crate::key::Key;
use crate::ops::{Flavor, GraphOps, Op, Snapshot};

/// Per-operation counters of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    /// Calls made, indexed by [`OpKind::index`].
    pub issued: [u64; 6],
    /// Calls that returned `true`.
    pub succeeded: [u64; 6],
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.issued.iter().sum()
    }

    pub fn issued(&self, kind: OpKind) -> u64 {
        self.issued[kind.index()]
    }

    pub fn failed(&self, kind: OpKind) -> u64 {
        self.issued[kind.index()] - self.succeeded[kind.index()]
    }

    pub fn merge(&mut self, other: &OpCounts) {
        for i in 0..6 {
            self.issued[i] += other.issued[i];
            self.succeeded[i] += other.succeeded[i];
        }
    }
}

/// Any of the benchmarked implementations.
pub enum AnyGraph {
    Plain(ConcGraph),
    Acyclic(AcyclicGraph),
    Coarse(CoarseLockGraph),
    Seq(SequentialGraph),
}

impl AnyGraph {
    pub fn ops(&self) -> &dyn GraphOps {
        match self {
            AnyGraph::Plain(g) => g,
            AnyGraph::Acyclic(g) => g,
            AnyGraph::Coarse(g) => g,
            AnyGraph::Seq(g) => g,
        }
    }

    /// Insertions rejected although no cycle existed; zero for the baselines.
    pub fn false_positives(&self) -> u64 {
        match self {
            AnyGraph::Acyclic(g) => g.diagnostics().false_positives,
            _ => 0,
        }
    }
}

pub fn build_graph(variant: Variant, acyclic: bool) -> AnyGraph {
    let flavor = if acyclic { Flavor::Acyclic } else { Flavor::Plain };
    let config = GraphConfig::default().with_die(variant == Variant::Die);
    match (variant, acyclic) {
        (Variant::NoDie | Variant::Die, false) => AnyGraph::Plain(ConcGraph::with_config(config)),
        (Variant::NoDie | Variant::Die, true) => AnyGraph::Acyclic(AcyclicGraph::with_config(config)),
        (Variant::Coarse, _) => AnyGraph::Coarse(CoarseLockGraph::new(flavor)),
        (Variant::Seq, _) => AnyGraph::Seq(SequentialGraph::new(flavor)),
    }
}

/// Inserts vertices `1..=vertices`, then each pair `(i, j)` with `i < j`
/// with probability `density`. Edges go in ascending source order, so on an
/// acyclic graph each cycle check starts at a vertex without out-edges.
/// Returns the number of edges inserted.
pub fn seed_initial_graph<G: GraphOps + ?Sized>(g: &G, initial: InitialGraph, seed: u64) -> u64 {
    let n = initial.vertices as i64;
    let key = |v: i64| Key::new(v).expect("small keys");
    for v in 1..=n {
        g.add_vertex(key(v));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = 0;
    for i in 1..=n {
        for j in i + 1..=n {
            let take = initial.density >= 1.0 || (initial.density > 0.0 && rng.gen_bool(initial.density));
            if take && g.add_edge(key(i), key(j)) {
                edges += 1;
            }
        }
    }
    edges
}

/// When a worker stops.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub ops: Option<u64>,
}

/// Runs one worker's stream against `g` until a limit is hit. A successful
/// vertex removal retires its slot. With a `gate`, each call runs under its
/// read lock so a prober can stop the world.
pub fn drive<G: GraphOps + ?Sized>(
    g: &G,
    keys: &KeySpace,
    stream: &mut OpStream,
    limits: Limits,
    gate: Option<&RwLock<()>>,
) -> OpCounts {
    let mut counts = OpCounts::default();
    let mut n: u64 = 0;
    loop {
        if limits.ops.is_some_and(|max| n >= max) {
            break;
        }
        if n.is_multiple_of(64) && limits.deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let planned = stream.next_planned();
        let op = keys.resolve(planned);
        let ret = match gate {
            Some(lock) => {
                let _held = lock.read();
                g.apply(op)
            }
            None => g.apply(op),
        };
        if ret && matches!(op, Op::RemoveVertex(_)) {
            keys.retire(planned.a);
        }
        let i = planned.kind.index();
        counts.issued[i] += 1;
        counts.succeeded[i] += ret as u64;
        n += 1;
    }
    counts
}

/// Outcome of a single run.
#[derive(Clone, Debug, Default)]
pub struct RunStats {
    pub counts: OpCounts,
    pub elapsed: Duration,
    pub false_positives: u64,
    /// Whether the final confirmed edges are acyclic; `None` on plain runs.
    pub audit: Option<bool>,
    /// One entry per stop-the-world probe.
    pub probes: Vec<bool>,
}

impl RunStats {
    pub fn ops_per_sec(&self) -> f64 {
        self.counts.total() as f64 / self.elapsed.as_secs_f64().max(1e-9)
    }
}

/// A check run while every worker is parked between operations.
pub struct Probe<'a> {
    pub every: Duration,
    pub check: &'a (dyn Fn(&Snapshot) -> bool + Sync),
}

fn run_threads<G: GraphOps + Sync>(g: &G, spec: &WorkloadSpec, seed: u64, probe: Option<&Probe<'_>>) -> (OpCounts, Duration, Vec<bool>) {
    let keys = KeySpace::new(spec.key_range);
    let threads = spec.effective_threads();
    let gate = RwLock::new(());
    let start = Instant::now();
    let limits = Limits {
        deadline: (!spec.duration.is_zero()).then(|| start + spec.duration),
        ops: spec.ops_per_thread,
    };
    let mut probes = Vec::new();
    let counts = thread::scope(|s| {
        let workers: Vec<_> = (0..threads)
            .map(|t| {
                let (keys, gate) = (&keys, &gate);
                let mut stream = OpStream::new(seed, t, threads, spec.mix, spec.key_range);
                s.spawn(move || drive(g, keys, &mut stream, limits, probe.map(|_| gate)))
            })
            .collect();
        if let Some(p) = probe {
            while !workers.iter().all(|w| w.is_finished()) {
                thread::sleep(p.every);
                let snapshot = {
                    let _world = gate.write();
                    g.snapshot()
                };
                probes.push((p.check)(&snapshot));
            }
        }
        let mut total = OpCounts::default();
        for w in workers {
            total.merge(&w.join().expect("worker panicked"));
        }
        total
    });
    (counts, start.elapsed(), probes)
}

fn run_graph(graph: &AnyGraph, spec: &WorkloadSpec, seed: u64, probe: Option<&Probe<'_>>) -> (OpCounts, Duration, Vec<bool>) {
    match graph {
        AnyGraph::Plain(g) => run_threads(g, spec, seed, probe),
        AnyGraph::Acyclic(g) => run_threads(g, spec, seed, probe),
        AnyGraph::Coarse(g) => run_threads(g, spec, seed, probe),
        AnyGraph::Seq(g) => {
            let keys = KeySpace::new(spec.key_range);
            let start = Instant::now();
            let limits = Limits {
                deadline: (!spec.duration.is_zero()).then(|| start + spec.duration),
                ops: spec.ops_per_thread,
            };
            let mut stream = OpStream::new(seed, 0, 1, spec.mix, spec.key_range);
            let counts = drive(g, &keys, &mut stream, limits, None);
            (counts, start.elapsed(), Vec::new())
        }
    }
}

/// Runs frees that removed nodes left with the epoch collector, so their cost
/// does not land in whatever is measured next. The workers must have exited.
pub fn drain_deferred() {
    // Each flush collects a bounded batch; stop once a few in a row are cheap.
    let mut quiet = 0;
    while quiet < 64 {
        let t = Instant::now();
        epoch::pin().flush();
        quiet = if t.elapsed() < Duration::from_micros(5) { quiet + 1 } else { 0 };
    }
}

/// One iteration: fresh graph, initial seeding, timed run, final audit on
/// acyclic runs. `probe` is ignored by the single-threaded variant.
pub fn run_once(spec: &WorkloadSpec, iteration: u32, probe: Option<&Probe<'_>>) -> Result<RunStats, SpecError> {
    spec.validate()?;
    let graph = build_graph(spec.variant, spec.acyclic);
    seed_initial_graph(graph.ops(), spec.initial, spec.seed.wrapping_add(iteration as u64));
    run_on(&graph, spec, iteration, probe)
}

/// Runs the workers of `spec` against an already seeded `graph`, which the
/// caller keeps for inspection afterwards.
pub fn run_on(graph: &AnyGraph, spec: &WorkloadSpec, iteration: u32, probe: Option<&Probe<'_>>) -> Result<RunStats, SpecError> {
    spec.validate()?;
    let seed = spec.seed.wrapping_add(iteration as u64);
    let (counts, elapsed, probes) = run_graph(graph, spec, seed, probe);
    drain_deferred();
    let audit = spec.acyclic.then(|| !oracle_cycle_check(&graph.ops().snapshot()));
    Ok(RunStats {
        counts,
        elapsed,
        false_positives: graph.false_positives(),
        audit,
        probes,
    })
}

/// Aggregate over all iterations of one spec.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub workload: String,
    pub variant: String,
    pub threads: usize,
    pub iterations: u32,
    /// Summed over iterations.
    pub total_ops: u64,
    /// Mean over iterations.
    pub ops_per_sec: f64,
    pub per_op: OpCounts,
    pub failed_add_edge: u64,
    pub false_positives: u64,
    /// Every acyclic iteration ended acyclic; `None` on plain runs.
    pub audit_passed: Option<bool>,
}

pub fn run_benchmark(spec: &WorkloadSpec) -> Result<BenchResult, SpecError> {
    spec.validate()?;
    let mut per_op = OpCounts::default();
    let mut rate_sum = 0.0;
    let mut false_positives = 0;
    let mut audit_passed = spec.acyclic.then_some(true);
    for it in 0..spec.iterations {
        let run = run_once(spec, it, None)?;
        per_op.merge(&run.counts);
        rate_sum += run.ops_per_sec();
        false_positives += run.false_positives;
        if let (Some(all), Some(this)) = (audit_passed.as_mut(), run.audit) {
            *all &= this;
        }
    }
    Ok(BenchResult {
        workload: spec.name.clone(),
        variant: spec.label(),
        threads: spec.effective_threads(),
        iterations: spec.iterations,
        total_ops: per_op.total(),
        ops_per_sec: rate_sum / spec.iterations as f64,
        per_op,
        failed_add_edge: per_op.failed(OpKind::AddEdge),
        false_positives,
        audit_passed,
    })
}
