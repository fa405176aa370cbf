use std::sync::Barrier;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::history::{History, Recorder, RecorderOverflow};
use crate::acyclic::AcyclicGraph;
use crate::baselines::oracle_cycle_check;
use crate::key::Key;
use crate::ops::{GraphOps, Op, Snapshot};

/// True iff the confirmed edges of `s` form no directed cycle.
pub fn audit_snapshot(s: &Snapshot) -> bool {
    !oracle_cycle_check(s)
}

/// Checks the confirmed subgraph of `g`. Call it when no update is in
/// flight: at quiescence or with every worker paused.
pub fn audit_acyclicity(g: &AcyclicGraph) -> bool {
    audit_snapshot(&g.snapshot())
}

/// Shape of a small randomized history.
///
/// Keys `1..=key_range` are split in two: odd keys are only ever inserted,
/// even keys are inserted by a setup prefix and then only ever removed. A
/// key therefore never comes back after its removal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HistoryWorkload {
    pub threads: usize,
    pub ops_per_thread: usize,
    pub key_range: i64,
    /// Edges among setup vertices inserted before the workers start.
    pub setup_edges: usize,
    pub seed: u64,
    /// Per-mille chance of yielding at each internal pause point; only has
    /// an effect with the `test-hooks` feature.
    pub chaos: u32,
}

impl Default for HistoryWorkload {
    fn default() -> Self {
        HistoryWorkload {
            threads: 4,
            ops_per_thread: 6,
            key_range: 8,
            setup_edges: 2,
            seed: 0,
            chaos: 200,
        }
    }
}

fn key(v: i64) -> Key {
    Key::new(v).expect("small keys")
}

fn random_op(rng: &mut ChaCha8Rng, w: &HistoryWorkload) -> Op {
    let any = |rng: &mut ChaCha8Rng| key(rng.gen_range(1..=w.key_range));
    let odd: Vec<i64> = (1..=w.key_range).filter(|v| v % 2 == 1).collect();
    let even: Vec<i64> = (1..=w.key_range).filter(|v| v % 2 == 0).collect();
    match rng.gen_range(0..6) {
        0 => Op::AddVertex(key(*odd.choose(rng).unwrap())),
        1 => match even.choose(rng) {
            Some(&v) => Op::RemoveVertex(key(v)),
            None => Op::ContainsVertex(any(rng)),
        },
        2 => Op::ContainsVertex(any(rng)),
        3 => Op::AddEdge(any(rng), any(rng)),
        4 => Op::RemoveEdge(any(rng), any(rng)),
        _ => Op::ContainsEdge(any(rng), any(rng)),
    }
}

/// Records one run of `w` against `graph`, which must start out empty.
///
/// Setup calls appear as thread `w.threads` and complete before any worker
/// starts.
pub fn record<G: GraphOps + Sync>(w: &HistoryWorkload, graph: &G) -> Result<History, RecorderOverflow> {
    let recorder = Recorder::new(graph.flavor(), 2 * w.ops_per_thread.max(w.key_range as usize + w.setup_edges));
    let mut rng = ChaCha8Rng::seed_from_u64(w.seed);
    {
        let mut setup = recorder.thread(w.threads as u32);
        let even: Vec<i64> = (1..=w.key_range).filter(|v| v % 2 == 0).collect();
        for &v in &even {
            setup.call(graph, Op::AddVertex(key(v)));
        }
        for _ in 0..w.setup_edges.min(even.len() * even.len()) {
            let a = *even.choose(&mut rng).unwrap();
            let b = *even.choose(&mut rng).unwrap();
            setup.call(graph, Op::AddEdge(key(a), key(b)));
        }
    }
    let scripts: Vec<Vec<Op>> = (0..w.threads)
        .map(|_| (0..w.ops_per_thread).map(|_| random_op(&mut rng, w)).collect())
        .collect();
    let barrier = Barrier::new(w.threads);
    std::thread::scope(|s| {
        for (t, script) in scripts.iter().enumerate() {
            let (recorder, barrier) = (&recorder, &barrier);
            let chaos_seed = w.seed ^ (t as u64 + 1) << 32;
            s.spawn(move || {
                #[cfg(feature = "test-hooks")]
                crate::hooks::set_chaos(w.chaos, chaos_seed);
                #[cfg(not(feature = "test-hooks"))]
                let _ = chaos_seed;
                let mut me = recorder.thread(t as u32);
                barrier.wait();
                for &op in script {
                    me.call(graph, op);
                }
                #[cfg(feature = "test-hooks")]
                crate::hooks::set_chaos(0, 0);
            });
        }
    });
    recorder.finish()
}
