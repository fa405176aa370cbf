use std::sync::atomic::{AtomicU32, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Mix, OpKind};
use crate::key::Key;
use crate::ops::Op;

/// Maps `key_range` slots to vertex keys so that a removed key is never
/// inserted again.
///
/// Slot `s` currently names key `1 + s + range * generation(s)`. Only the
/// thread owning a slot adds or removes its vertex, and it bumps the
/// generation after each successful removal, so the next insertion through
/// that slot uses a fresh key. Edge and lookup operations may name any slot.
#[derive(Debug)]
pub struct KeySpace {
    range: u32,
    generations: Vec<AtomicU32>,
}

impl KeySpace {
    pub fn new(range: u32) -> Self {
        KeySpace {
            range,
            generations: (0..range).map(|_| AtomicU32::new(0)).collect(),
        }
    }

    pub fn range(&self) -> u32 {
        self.range
    }

    pub fn key(&self, slot: u32) -> Key {
        let generation = self.generations[slot as usize].load(Ordering::Acquire) as i64;
        Key::new(1 + slot as i64 + self.range as i64 * generation).expect("generations stay far below the sentinels")
    }

    /// Moves `slot` on to a fresh key. Called by the slot's owner after it
    /// removed the current key.
    pub fn retire(&self, slot: u32) {
        self.generations[slot as usize].fetch_add(1, Ordering::AcqRel);
    }

    pub fn owner(slot: u32, threads: usize) -> usize {
        slot as usize % threads
    }

    pub fn resolve(&self, p: Planned) -> Op {
        let a = self.key(p.a);
        match p.kind {
            OpKind::AddVertex => Op::AddVertex(a),
            OpKind::RemoveVertex => Op::RemoveVertex(a),
            OpKind::ContainsVertex => Op::ContainsVertex(a),
            OpKind::AddEdge => Op::AddEdge(a, self.key(p.b)),
            OpKind::RemoveEdge => Op::RemoveEdge(a, self.key(p.b)),
            OpKind::ContainsEdge => Op::ContainsEdge(a, self.key(p.b)),
        }
    }
}

/// An operation drawn by a worker, naming slots rather than keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Planned {
    pub kind: OpKind,
    pub a: u32,
    /// Destination slot of edge operations; `a` otherwise.
    pub b: u32,
}

/// One worker's deterministic operation stream: the same seed and thread
/// index give the same sequence of kinds and slots.
#[derive(Clone, Debug)]
pub struct OpStream {
    rng: ChaCha8Rng,
    mix: Mix,
    thread: usize,
    threads: usize,
    range: u32,
}

impl OpStream {
    pub fn new(seed: u64, thread: usize, threads: usize, mix: Mix, range: u32) -> Self {
        assert!(threads >= 1 && threads <= range as usize, "every thread must own a slot");
        let stream_seed = seed ^ (thread as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        OpStream {
            rng: ChaCha8Rng::seed_from_u64(stream_seed),
            mix,
            thread,
            threads,
            range,
        }
    }

    fn owned_slot(&mut self) -> u32 {
        let owned = (self.range as usize - self.thread).div_ceil(self.threads);
        (self.thread + self.threads * self.rng.gen_range(0..owned)) as u32
    }

    pub fn next_planned(&mut self) -> Planned {
        let kind = self.mix.pick(self.rng.gen_range(0..100u8));
        if kind.is_vertex_update() {
            let a = self.owned_slot();
            return Planned { kind, a, b: a };
        }
        let a = self.rng.gen_range(0..self.range);
        let b = if matches!(kind, OpKind::ContainsVertex) {
            a
        } else {
            self.rng.gen_range(0..self.range)
        };
        Planned { kind, a, b }
    }
}

impl Iterator for OpStream {
    type Item = Planned;
    fn next(&mut self) -> Option<Planned> {
        Some(self.next_planned())
    }
}
