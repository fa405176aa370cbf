//! Graph that keeps its confirmed edges acyclic.
//!
//! A new edge is linked as `Transit`, which lookups and removers ignore but
//! reachability checks see. The inserting thread then asks whether the
//! destination already reaches the source. If it does, the edge is marked and
//! unlinked again and the insertion fails; otherwise it becomes `Added`.
//!
//! Because every check sees every provisional edge, two insertions that
//! together would close a cycle cannot both succeed. Both may fail, though:
//! each sees the other's provisional edge. Those aborts are counted as false
//! positives in [`Diagnostics`].

use std::collections::{HashSet, VecDeque};
use std::sync::atomic::Ordering;

use crossbeam_epoch::{self as epoch, Guard, Owned};

use crate::diag::Diagnostics;
use crate::graph::{EdgeCheck, GraphConfig, RawGraph, StructureReport};
use crate::hooks::{self, HookPoint};
use crate::key::Key;
use crate::node::{load, shared, EdgeNode, EdgeStatus, VertexNode, Window};
use crate::ops::{Flavor, GraphOps, Snapshot};

/// Keys reached so far by one reachability query. Never shared.
///
/// Keys are expanded first-in first-out; a key counts as explored once it
/// has left the queue.
#[derive(Debug, Default)]
pub(crate) struct ReachSet {
    seen: HashSet<i64>,
    unexplored: VecDeque<i64>,
}

impl ReachSet {
    /// The source starts out explored, so it is never expanded twice.
    pub(crate) fn new(source: i64) -> Self {
        let mut seen = HashSet::new();
        seen.insert(source);
        ReachSet {
            seen,
            unexplored: VecDeque::new(),
        }
    }

    pub(crate) fn insert(&mut self, k: i64) {
        if self.seen.insert(k) {
            self.unexplored.push_back(k);
        }
    }

    pub(crate) fn next_unexplored(&mut self) -> Option<i64> {
        self.unexplored.pop_front()
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.seen.len()
    }
}

/// Which edge states a reachability walk follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Visible {
    /// Transit and Added.
    Unmarked,
    /// Added only.
    Confirmed,
}

impl Visible {
    fn admits(self, st: EdgeStatus) -> bool {
        match self {
            Visible::Unmarked => st != EdgeStatus::Marked,
            Visible::Confirmed => st == EdgeStatus::Added,
        }
    }
}

/// Concurrent directed graph whose confirmed edges never form a cycle.
pub struct AcyclicGraph {
    raw: RawGraph,
}

impl Default for AcyclicGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl AcyclicGraph {
    pub fn new() -> Self {
        Self::with_config(GraphConfig::default())
    }

    pub fn with_config(config: GraphConfig) -> Self {
        AcyclicGraph {
            raw: RawGraph::new(config),
        }
    }

    pub fn config(&self) -> GraphConfig {
        self.raw.config()
    }

    pub fn add_vertex(&self, k: Key) -> bool {
        self.raw.add_vertex(k.get())
    }

    pub fn remove_vertex(&self, k: Key) -> bool {
        self.remove_vertex_with(k, self.raw.config().die)
    }

    pub fn remove_vertex_with(&self, k: Key, die: bool) -> bool {
        self.raw.remove_vertex(k.get(), die, EdgeCheck::Confirmed)
    }

    pub fn contains_vertex(&self, k: Key) -> bool {
        self.raw.contains_vertex(k.get())
    }

    /// Inserts `from -> to` unless an endpoint is missing or the edge would
    /// close a cycle. May also fail when the cycle runs through a concurrent
    /// insertion that is itself later rolled back.
    pub fn acyclic_add_edge(&self, from: Key, to: Key) -> bool {
        let (from, to) = (from.get(), to.get());
        let guard = &epoch::pin();
        let (u, v, node) = loop {
            let Some((w, u, v)) = self.raw.locate_edge(from, to, EdgeCheck::Unmarked, guard) else {
                return false;
            };
            hooks::hit(HookPoint::EdgeWindowLocked);
            if w.curr.key == to {
                match w.curr.status() {
                    EdgeStatus::Added => return true,
                    // Another thread is checking this very edge; its outcome
                    // decides ours.
                    _ => {
                        let pending = w.curr;
                        drop(w);
                        while pending.status() == EdgeStatus::Transit {
                            std::thread::yield_now();
                        }
                        continue;
                    }
                }
            }
            let node = Owned::new(EdgeNode::new(to, EdgeStatus::Transit));
            node.next.store(shared(w.curr), Ordering::SeqCst);
            let node = node.into_shared(guard);
            w.pred.next.store(node, Ordering::SeqCst);
            drop(w);
            // Linked nodes stay allocated while we are pinned.
            break (u, v, unsafe { node.deref() });
        };
        hooks::hit(HookPoint::TransitLinked);

        self.raw.stats.cycle_checks.add(1);
        let cycle = self.reaches(to, from, Visible::Unmarked, guard);
        hooks::hit(HookPoint::CycleChecked);
        if !cycle {
            // A check that ran while an endpoint was being removed proves
            // nothing: the walk may have started at a dead vertex or lost
            // edges to incoming-edge cleanup. The removal happened during
            // this call, so failing is a legal answer.
            if u.is_marked() || v.is_marked() {
                self.roll_back(u, node, guard);
                return false;
            }
            node.transition(EdgeStatus::Added);
            return true;
        }

        self.roll_back(u, node, guard);
        self.raw.stats.cycle_rejections.add(1);
        if from != to && !self.reaches(to, from, Visible::Confirmed, guard) {
            self.raw.stats.false_positives.add(1);
        }
        false
    }

    /// Marks and unlinks our own provisional `node` from `u`'s edge list.
    fn roll_back(&self, u: &VertexNode, node: &EdgeNode, guard: &Guard) {
        let w = self.new_locate_edge(u, node, guard);
        node.transition(EdgeStatus::Marked);
        let succ = node.next.load(Ordering::SeqCst, guard);
        w.pred.next.store(succ, Ordering::SeqCst);
        drop(w);
        self.raw.retire_edge(node, guard);
    }

    /// Locks the window whose successor is our own Transit `node` in `u`'s
    /// edge list. `u` may have been removed meanwhile; its list is still
    /// reachable from the node itself.
    fn new_locate_edge<'g>(&'g self, u: &'g VertexNode, node: &'g EdgeNode, guard: &'g Guard) -> Window<'g, EdgeNode> {
        let mut retries = 0u64;
        loop {
            let (pred, curr) = RawGraph::seek_edge(u, node.key, guard);
            hooks::hit(HookPoint::RollbackBeforeLock);
            let w = Window::lock(pred, curr);
            if RawGraph::validate_edge(pred, curr, EdgeCheck::Unmarked, guard) {
                debug_assert!(std::ptr::eq(curr, node), "transit node cannot be unlinked by others");
                if retries > 0 {
                    self.raw.stats.validation_retries.add(retries);
                }
                return w;
            }
            drop(w);
            retries += 1;
        }
    }

    /// Removes a confirmed edge. A provisional edge is left to its inserter:
    /// validation keeps failing until it is resolved.
    pub fn acyclic_remove_edge(&self, from: Key, to: Key) -> bool {
        self.raw.remove_edge(from.get(), to.get())
    }

    /// True iff both endpoints are live and the edge is confirmed.
    pub fn acyclic_contains_edge(&self, from: Key, to: Key) -> bool {
        self.raw.contains_edge(from.get(), to.get())
    }

    /// Whether `to` is reachable from `from` over edges that are not marked,
    /// provisional ones included. Lock-free; each key is expanded at most once.
    pub fn path_exists(&self, from: Key, to: Key) -> bool {
        let guard = &epoch::pin();
        self.reaches(from.get(), to.get(), Visible::Unmarked, guard)
    }

    fn reaches(&self, from: i64, to: i64, visible: Visible, guard: &Guard) -> bool {
        let v = self.raw.seek_vertex(from, guard);
        if v.key != from || v.is_marked() {
            return false;
        }
        let mut reach = ReachSet::new(from);
        if scan_out_edges(v, to, visible, &mut reach, guard) {
            return true;
        }
        while let Some(k) = reach.next_unexplored() {
            hooks::hit(HookPoint::PathExpand);
            // Re-locate from the head: the vertex may have come or gone.
            let v = self.raw.seek_vertex(k, guard);
            if v.key != k || v.is_marked() {
                continue;
            }
            if scan_out_edges(v, to, visible, &mut reach, guard) {
                return true;
            }
        }
        false
    }

    pub fn snapshot(&self) -> Snapshot {
        self.raw.snapshot()
    }

    /// Every linked edge of every live vertex, with its current status.
    pub fn edge_statuses(&self) -> Vec<(Key, Key, EdgeStatus)> {
        let (_, entries) = self.raw.edge_entries();
        entries
            .into_iter()
            .map(|(a, b, st)| (Key::new(a).unwrap(), Key::new(b).unwrap(), st))
            .collect()
    }

    pub fn check_structure(&self) -> StructureReport {
        self.raw.check_structure()
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.raw.diagnostics()
    }
}

fn scan_out_edges(v: &VertexNode, to: i64, visible: Visible, reach: &mut ReachSet, guard: &Guard) -> bool {
    let mut e = load(&v.edges.next, guard);
    while !e.is_tail() {
        if visible.admits(e.status()) {
            if e.key == to {
                return true;
            }
            reach.insert(e.key);
        }
        e = load(&e.next, guard);
    }
    false
}

impl GraphOps for AcyclicGraph {
    fn flavor(&self) -> Flavor {
        Flavor::Acyclic
    }
    fn add_vertex(&self, k: Key) -> bool {
        AcyclicGraph::add_vertex(self, k)
    }
    fn remove_vertex(&self, k: Key) -> bool {
        AcyclicGraph::remove_vertex(self, k)
    }
    fn contains_vertex(&self, k: Key) -> bool {
        AcyclicGraph::contains_vertex(self, k)
    }
    fn add_edge(&self, from: Key, to: Key) -> bool {
        self.acyclic_add_edge(from, to)
    }
    fn remove_edge(&self, from: Key, to: Key) -> bool {
        self.acyclic_remove_edge(from, to)
    }
    fn contains_edge(&self, from: Key, to: Key) -> bool {
        self.acyclic_contains_edge(from, to)
    }
    fn snapshot(&self) -> Snapshot {
        AcyclicGraph::snapshot(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reach_set_is_fifo_without_duplicates() {
        let mut r = ReachSet::new(1);
        r.insert(3);
        r.insert(2);
        r.insert(3);
        r.insert(1);
        assert_eq!(r.len(), 3);
        assert_eq!(r.next_unexplored(), Some(3));
        assert_eq!(r.next_unexplored(), Some(2));
        assert_eq!(r.next_unexplored(), None);
    }
}
