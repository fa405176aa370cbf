//! Concurrent adjacency list: a sorted lazy list of vertices, each owning a
//! sorted lazy list of outgoing edges.
//!
//! Updates lock two adjacent nodes, validate them, and then mutate; removal
//! first marks a node (logical removal) and then unlinks it (physical
//! removal). Lookups never lock: they walk the list, possibly through nodes
//! that were unlinked after the walk started, and decide from the key and the
//! mark of the node they stop at.
//!
//! Every lock acquisition goes predecessor-then-successor within one list,
//! i.e. in ascending key order, and no thread holds vertex locks and edge locks
//! at the same time. That ordering is the deadlock-freedom argument.

use std::sync::atomic::Ordering;

use crossbeam_epoch::{self as epoch, Guard, Owned};

use crate::diag::{Diagnostics, Stats};
use crate::hooks::{self, HookPoint};
use crate::key::{Key, SENTINEL_MAX, SENTINEL_MIN};
use crate::node::{load, points_to, shared, EdgeNode, EdgeStatus, VertexNode, Window};
use crate::ops::{Flavor, GraphOps, Snapshot};

/// What happens to nodes after they are unlinked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Reclamation {
    /// Retire to the epoch collector; freed once no pinned thread can still
    /// be traversing them.
    #[default]
    Epoch,
    /// Never free unlinked nodes. Reachable nodes are still freed on drop.
    Leak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GraphConfig {
    /// Run the incoming-edge cleanup after every successful vertex removal.
    pub die: bool,
    pub reclamation: Reclamation,
    /// Retries per operation above which `budget_overruns` is bumped.
    pub retry_budget: u32,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            die: false,
            reclamation: Reclamation::Epoch,
            retry_budget: 64,
        }
    }
}

impl GraphConfig {
    pub fn with_die(mut self, die: bool) -> Self {
        self.die = die;
        self
    }

    pub fn with_reclamation(mut self, reclamation: Reclamation) -> Self {
        self.reclamation = reclamation;
        self
    }
}

/// Shape checks over the reachable part of the structure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureReport {
    /// Every list strictly ascending from its head to its tail sentinel.
    pub sorted: bool,
    pub vertices: usize,
    pub edge_nodes: usize,
    /// Marked nodes still linked; zero whenever no removal is in flight.
    pub marked_vertices_linked: usize,
    pub marked_edges_linked: usize,
}

impl StructureReport {
    pub fn is_quiescent_clean(&self) -> bool {
        self.sorted && self.marked_vertices_linked == 0 && self.marked_edges_linked == 0
    }
}

/// Which nodes a locked edge window accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum EdgeCheck {
    /// Neither node is marked. Insertions and rollbacks use this, so they may
    /// lock around provisional nodes.
    Unmarked,
    /// Both nodes are confirmed. Removals use this so a provisional node can
    /// only be resolved by the thread that inserted it.
    Confirmed,
}

pub(crate) struct RawGraph {
    head: VertexNode,
    config: GraphConfig,
    pub(crate) stats: Stats,
}

impl RawGraph {
    pub(crate) fn new(config: GraphConfig) -> Self {
        let head = VertexNode::new(SENTINEL_MIN);
        head.next
            .store(Owned::new(VertexNode::new(SENTINEL_MAX)), Ordering::Relaxed);
        RawGraph {
            head,
            config,
            stats: Stats::new(),
        }
    }

    pub(crate) fn config(&self) -> GraphConfig {
        self.config
    }

    pub(crate) fn diagnostics(&self) -> Diagnostics {
        self.stats.snapshot()
    }

    fn note_retries(&self, retries: u32) {
        if retries > 0 {
            self.stats.validation_retries.add(retries as u64);
            if retries > self.config.retry_budget {
                self.stats.budget_overruns.add(1);
            }
        }
    }

    fn retire_vertex(&self, node: &VertexNode, guard: &Guard) {
        if self.config.reclamation == Reclamation::Epoch {
            unsafe { guard.defer_destroy(shared(node)) }
        }
    }

    pub(crate) fn retire_edge(&self, node: &EdgeNode, guard: &Guard) {
        if self.config.reclamation == Reclamation::Epoch {
            unsafe { guard.defer_destroy(shared(node)) }
        }
    }

    // ---- vertices -------------------------------------------------------

    fn validate_vertex(pred: &VertexNode, curr: &VertexNode, guard: &Guard) -> bool {
        !pred.is_marked() && !curr.is_marked() && points_to(&pred.next, curr, guard)
    }

    /// Returns the locked, validated window `pred.key < key <= curr.key`.
    pub(crate) fn locate_vertex<'g>(&'g self, key: i64, guard: &'g Guard) -> Window<'g, VertexNode> {
        let mut retries = 0;
        loop {
            let mut pred = &self.head;
            let mut curr = load(&pred.next, guard);
            while curr.key < key {
                pred = curr;
                curr = load(&curr.next, guard);
            }
            hooks::hit(HookPoint::LocateVertexBeforeLock);
            let window = Window::lock(pred, curr);
            if Self::validate_vertex(pred, curr, guard) {
                self.note_retries(retries);
                return window;
            }
            drop(window);
            retries += 1;
        }
    }

    /// First node with `node.key >= key`, found without locks.
    pub(crate) fn seek_vertex<'g>(&'g self, key: i64, guard: &'g Guard) -> &'g VertexNode {
        let mut v = &self.head;
        while v.key < key {
            v = load(&v.next, guard);
        }
        v
    }

    pub(crate) fn add_vertex(&self, key: i64) -> bool {
        let guard = &epoch::pin();
        let w = self.locate_vertex(key, guard);
        hooks::hit(HookPoint::VertexWindowLocked);
        if w.curr.key != key {
            let node = Owned::new(VertexNode::new(key));
            node.next.store(shared(w.curr), Ordering::SeqCst);
            w.pred.next.store(node, Ordering::SeqCst);
        }
        true
    }

    pub(crate) fn remove_vertex(&self, key: i64, die: bool, edge_check: EdgeCheck) -> bool {
        let guard = &epoch::pin();
        let w = self.locate_vertex(key, guard);
        hooks::hit(HookPoint::VertexWindowLocked);
        if w.curr.key != key {
            return false;
        }
        w.curr.mark();
        let succ = w.curr.next.load(Ordering::SeqCst, guard);
        w.pred.next.store(succ, Ordering::SeqCst);
        self.retire_vertex(w.curr, guard);
        drop(w);
        hooks::hit(HookPoint::VertexUnlinked);
        if die {
            self.remove_incoming_edges(key, edge_check, guard);
        }
        true
    }

    /// Marks and unlinks every edge node with `key` as destination.
    ///
    /// Visits each vertex on the `vnext` chain once, so vertices inserted
    /// behind the cursor are not revisited.
    pub(crate) fn remove_incoming_edges(&self, key: i64, check: EdgeCheck, guard: &Guard) {
        let mut vertex = load(&self.head.next, guard);
        while vertex.key != SENTINEL_MAX {
            let mut retries = 0;
            loop {
                let (pred, curr) = Self::seek_edge(vertex, key, guard);
                let w = Window::lock(pred, curr);
                if Self::validate_edge(pred, curr, check, guard) {
                    if curr.key == key {
                        curr.transition(EdgeStatus::Marked);
                        let succ = curr.next.load(Ordering::SeqCst, guard);
                        pred.next.store(succ, Ordering::SeqCst);
                        self.retire_edge(curr, guard);
                    }
                    break;
                }
                drop(w);
                retries += 1;
            }
            self.note_retries(retries);
            vertex = load(&vertex.next, guard);
        }
    }

    pub(crate) fn contains_vertex(&self, key: i64) -> bool {
        let guard = &epoch::pin();
        let v = self.seek_vertex(key, guard);
        hooks::hit(HookPoint::ContainsVertexLocated);
        v.key == key && !v.is_marked()
    }

    // ---- edges ----------------------------------------------------------

    pub(crate) fn validate_edge(pred: &EdgeNode, curr: &EdgeNode, check: EdgeCheck, guard: &Guard) -> bool {
        let ok = match check {
            EdgeCheck::Unmarked => !pred.is_marked() && !curr.is_marked(),
            EdgeCheck::Confirmed => {
                pred.status() == EdgeStatus::Added && curr.status() == EdgeStatus::Added
            }
        };
        ok && points_to(&pred.next, curr, guard)
    }

    /// Unlocked search of `vertex`'s edge list for the window around `key`.
    pub(crate) fn seek_edge<'g>(vertex: &'g VertexNode, key: i64, guard: &'g Guard) -> (&'g EdgeNode, &'g EdgeNode) {
        let mut pred = &vertex.edges;
        let mut curr = load(&pred.next, guard);
        while curr.key < key {
            pred = curr;
            curr = load(&curr.next, guard);
        }
        (pred, curr)
    }

    /// Finds both endpoints without locks, smaller key first, continuing the
    /// second search from the first endpoint. `None` if either is absent or
    /// marked when read.
    pub(crate) fn help_search_edge<'g>(
        &'g self,
        from: i64,
        to: i64,
        guard: &'g Guard,
    ) -> Option<(&'g VertexNode, &'g VertexNode)> {
        let (small, large) = if from <= to { (from, to) } else { (to, from) };
        let first = self.seek_vertex(small, guard);
        if first.key != small || first.is_marked() {
            return None;
        }
        hooks::hit(HookPoint::SearchFirstEndpointFound);
        let mut second = first;
        while second.key < large {
            second = load(&second.next, guard);
            hooks::hit(HookPoint::SearchSecondEndpointStep);
        }
        if second.key != large || second.is_marked() {
            return None;
        }
        if from <= to {
            Some((first, second))
        } else {
            Some((second, first))
        }
    }

    /// Locates both endpoints, checks their marks a second time, then locks
    /// and validates the window `pred.key < to <= curr.key` in `from`'s edge
    /// list, returned with both endpoint nodes. `None` if an endpoint is
    /// missing or marked.
    pub(crate) fn locate_edge<'g>(
        &'g self,
        from: i64,
        to: i64,
        check: EdgeCheck,
        guard: &'g Guard,
    ) -> Option<(Window<'g, EdgeNode>, &'g VertexNode, &'g VertexNode)> {
        let (u, v) = self.help_search_edge(from, to, guard)?;
        // Both endpoints were live at different instants; they must be live
        // together before the edge may be touched.
        if u.is_marked() || v.is_marked() {
            return None;
        }
        hooks::hit(HookPoint::EndpointsRechecked);
        let mut retries = 0;
        loop {
            let (pred, curr) = Self::seek_edge(u, to, guard);
            hooks::hit(HookPoint::LocateEdgeBeforeLock);
            let window = Window::lock(pred, curr);
            if Self::validate_edge(pred, curr, check, guard) {
                self.note_retries(retries);
                return Some((window, u, v));
            }
            drop(window);
            retries += 1;
        }
    }

    pub(crate) fn add_edge(&self, from: i64, to: i64) -> bool {
        let guard = &epoch::pin();
        let Some((w, ..)) = self.locate_edge(from, to, EdgeCheck::Unmarked, guard) else {
            return false;
        };
        hooks::hit(HookPoint::EdgeWindowLocked);
        if w.curr.key != to {
            let node = Owned::new(EdgeNode::new(to, EdgeStatus::Added));
            node.next.store(shared(w.curr), Ordering::SeqCst);
            w.pred.next.store(node, Ordering::SeqCst);
        }
        true
    }

    pub(crate) fn remove_edge(&self, from: i64, to: i64) -> bool {
        let guard = &epoch::pin();
        let Some((w, ..)) = self.locate_edge(from, to, EdgeCheck::Confirmed, guard) else {
            return false;
        };
        hooks::hit(HookPoint::EdgeWindowLocked);
        if w.curr.key == to {
            w.curr.transition(EdgeStatus::Marked);
            let succ = w.curr.next.load(Ordering::SeqCst, guard);
            w.pred.next.store(succ, Ordering::SeqCst);
            self.retire_edge(w.curr, guard);
        }
        true
    }

    /// True iff both endpoints are live and the edge node is confirmed.
    pub(crate) fn contains_edge(&self, from: i64, to: i64) -> bool {
        let guard = &epoch::pin();
        let Some((u, _)) = self.help_search_edge(from, to, guard) else {
            return false;
        };
        hooks::hit(HookPoint::ContainsEdgeEndpointsFound);
        let mut e = load(&u.edges.next, guard);
        while e.key < to {
            e = load(&e.next, guard);
        }
        hooks::hit(HookPoint::ContainsEdgeLocated);
        e.key == to && e.status() == EdgeStatus::Added
    }

    // ---- auditing -------------------------------------------------------

    /// Live vertices and, for each, every linked edge node with its status.
    pub(crate) fn edge_entries(&self) -> (Vec<i64>, Vec<(i64, i64, EdgeStatus)>) {
        let guard = &epoch::pin();
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut v = load(&self.head.next, guard);
        while v.key != SENTINEL_MAX {
            if !v.is_marked() {
                vertices.push(v.key);
                let mut e = load(&v.edges.next, guard);
                while !e.is_tail() {
                    edges.push((v.key, e.key, e.status()));
                    e = load(&e.next, guard);
                }
            }
            v = load(&v.next, guard);
        }
        (vertices, edges)
    }

    pub(crate) fn snapshot(&self) -> Snapshot {
        let (vertices, entries) = self.edge_entries();
        let live = |k: i64| vertices.binary_search(&k).is_ok();
        let edges = entries
            .into_iter()
            .filter(|&(_, to, st)| st == EdgeStatus::Added && live(to))
            .map(|(from, to, _)| (key(from), key(to)))
            .collect();
        Snapshot {
            vertices: vertices.into_iter().map(key).collect(),
            edges,
        }
    }

    pub(crate) fn check_structure(&self) -> StructureReport {
        let guard = &epoch::pin();
        let mut report = StructureReport {
            sorted: true,
            ..Default::default()
        };
        let mut prev = &self.head;
        loop {
            let v = load(&prev.next, guard);
            if v.key <= prev.key {
                report.sorted = false;
            }
            if v.key == SENTINEL_MAX {
                break;
            }
            report.vertices += 1;
            if v.is_marked() {
                report.marked_vertices_linked += 1;
            }
            let mut e_prev = &v.edges;
            loop {
                let e = load(&e_prev.next, guard);
                if e.key <= e_prev.key {
                    report.sorted = false;
                }
                if e.is_tail() {
                    break;
                }
                report.edge_nodes += 1;
                if e.is_marked() {
                    report.marked_edges_linked += 1;
                }
                e_prev = e;
            }
            prev = v;
        }
        report
    }
}

fn key(raw: i64) -> Key {
    Key::new(raw).expect("linked nodes never carry sentinel keys")
}

impl Drop for RawGraph {
    fn drop(&mut self) {
        // Exclusive access: free the reachable chain. Unlinked nodes belong to
        // the epoch collector (or were leaked on purpose).
        unsafe {
            let guard = epoch::unprotected();
            let mut cur = self.head.next.load(Ordering::Relaxed, guard);
            while !cur.is_null() {
                let next = cur.deref().next.load(Ordering::Relaxed, guard);
                drop(cur.into_owned());
                cur = next;
            }
        }
    }
}

/// Concurrent directed graph with lazy vertex and edge lists.
///
/// All six operations are safe to call from any number of threads through a
/// shared reference. `contains_vertex` and `contains_edge` never take a lock.
pub struct ConcGraph {
    raw: RawGraph,
}

impl Default for ConcGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl ConcGraph {
    pub fn new() -> Self {
        Self::with_config(GraphConfig::default())
    }

    pub fn with_config(config: GraphConfig) -> Self {
        ConcGraph {
            raw: RawGraph::new(config),
        }
    }

    pub fn config(&self) -> GraphConfig {
        self.raw.config()
    }

    /// Always true: an already-present key is left as is.
    pub fn add_vertex(&self, k: Key) -> bool {
        self.raw.add_vertex(k.get())
    }

    /// Removes `k`, cleaning up incoming edges if the graph was built with
    /// `die` set.
    pub fn remove_vertex(&self, k: Key) -> bool {
        self.remove_vertex_with(k, self.raw.config().die)
    }

    pub fn remove_vertex_with(&self, k: Key, die: bool) -> bool {
        self.raw.remove_vertex(k.get(), die, EdgeCheck::Confirmed)
    }

    /// Marks and unlinks all edges pointing at `k`. Only meaningful after `k`
    /// was removed; the edges are already invisible to lookups.
    pub fn remove_incoming_edges(&self, k: Key) {
        let guard = &epoch::pin();
        self.raw
            .remove_incoming_edges(k.get(), EdgeCheck::Confirmed, guard)
    }

    pub fn contains_vertex(&self, k: Key) -> bool {
        self.raw.contains_vertex(k.get())
    }

    /// False iff an endpoint is missing; true otherwise, whether or not the
    /// edge was already there.
    pub fn add_edge(&self, from: Key, to: Key) -> bool {
        self.raw.add_edge(from.get(), to.get())
    }

    /// False iff an endpoint is missing; true otherwise, whether or not the
    /// edge was there to remove.
    pub fn remove_edge(&self, from: Key, to: Key) -> bool {
        self.raw.remove_edge(from.get(), to.get())
    }

    pub fn contains_edge(&self, from: Key, to: Key) -> bool {
        self.raw.contains_edge(from.get(), to.get())
    }

    pub fn snapshot(&self) -> Snapshot {
        self.raw.snapshot()
    }

    pub fn check_structure(&self) -> StructureReport {
        self.raw.check_structure()
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.raw.diagnostics()
    }

    #[cfg(test)]
    pub(crate) fn raw(&self) -> &RawGraph {
        &self.raw
    }
}

impl GraphOps for ConcGraph {
    fn flavor(&self) -> Flavor {
        Flavor::Plain
    }
    fn add_vertex(&self, k: Key) -> bool {
        ConcGraph::add_vertex(self, k)
    }
    fn remove_vertex(&self, k: Key) -> bool {
        ConcGraph::remove_vertex(self, k)
    }
    fn contains_vertex(&self, k: Key) -> bool {
        ConcGraph::contains_vertex(self, k)
    }
    fn add_edge(&self, from: Key, to: Key) -> bool {
        ConcGraph::add_edge(self, from, to)
    }
    fn remove_edge(&self, from: Key, to: Key) -> bool {
        ConcGraph::remove_edge(self, from, to)
    }
    fn contains_edge(&self, from: Key, to: Key) -> bool {
        ConcGraph::contains_edge(self, from, to)
    }
    fn snapshot(&self) -> Snapshot {
        ConcGraph::snapshot(self)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;
    use std::thread;
    use std::time::Duration;

    use super::*;
    use crate::hooks::{arm, Breakpoint};

    const WAIT: Duration = Duration::from_secs(5);

    fn k(v: i64) -> Key {
        Key::new(v).unwrap()
    }

    fn graph_with(vertices: &[i64], edges: &[(i64, i64)]) -> ConcGraph {
        let g = ConcGraph::new();
        for &v in vertices {
            g.add_vertex(k(v));
        }
        for &(a, b) in edges {
            assert!(g.add_edge(k(a), k(b)));
        }
        g
    }

    #[test]
    fn vertex_basics() {
        let g = ConcGraph::new();
        assert!(g.add_vertex(k(5)));
        assert!(g.contains_vertex(k(5)));
        assert!(!g.contains_vertex(k(6)));
        assert!(g.add_vertex(k(5)));
        assert_eq!(g.snapshot().vertices, vec![k(5)]);
        assert!(g.add_vertex(k(7)));
        assert!(g.remove_vertex(k(7)));
        assert!(!g.remove_vertex(k(9)));
        assert_eq!(g.snapshot().vertices, vec![k(5)]);
    }

    #[test]
    fn edge_basics() {
        let g = graph_with(&[5, 7], &[]);
        assert!(!g.contains_edge(k(5), k(7)));
        assert!(g.add_edge(k(5), k(7)));
        assert!(g.add_edge(k(5), k(7)));
        assert!(g.contains_edge(k(5), k(7)));
        assert!(!g.contains_edge(k(7), k(5)));
        assert_eq!(g.snapshot().edges, vec![(k(5), k(7))]);
        assert!(g.remove_edge(k(5), k(7)));
        assert!(g.snapshot().edges.is_empty());
        // absent edge, live endpoints
        assert!(g.remove_edge(k(5), k(7)));
        assert!(!g.add_edge(k(5), k(9)));
        assert!(!g.remove_edge(k(5), k(9)));
        assert!(!g.contains_edge(k(5), k(9)));
    }

    #[test]
    fn self_loops_are_ordinary_edges() {
        let g = graph_with(&[3], &[(3, 3)]);
        assert!(g.contains_edge(k(3), k(3)));
        assert!(g.remove_edge(k(3), k(3)));
        assert!(!g.contains_edge(k(3), k(3)));
    }

    #[test]
    fn incoming_edges_are_cleaned_with_die() {
        let g = graph_with(&[1, 2, 3], &[(1, 3), (2, 3), (3, 1)]);
        assert!(g.remove_vertex_with(k(3), true));
        let (_, entries) = g.raw().edge_entries();
        assert!(entries.iter().all(|&(_, to, _)| to != 3), "{entries:?}");
        assert!(g.check_structure().is_quiescent_clean());
    }

    #[test]
    fn incoming_edges_linger_without_die_but_are_invisible() {
        let g = graph_with(&[1, 2, 3], &[(1, 3), (2, 3)]);
        assert!(g.remove_vertex_with(k(3), false));
        let (_, entries) = g.raw().edge_entries();
        assert_eq!(entries.len(), 2);
        assert!(g.snapshot().edges.is_empty());
        assert!(!g.contains_edge(k(1), k(3)));
        // a later cleanup pass removes them
        g.remove_incoming_edges(k(3));
        assert!(g.raw().edge_entries().1.is_empty());
    }

    #[test]
    fn cleanup_without_incoming_edges_changes_nothing() {
        let g = graph_with(&[1, 2], &[(1, 2)]);
        let before = g.raw().edge_entries();
        g.remove_incoming_edges(k(9));
        assert_eq!(g.raw().edge_entries(), before);
    }

    #[test]
    fn locate_vertex_windows() {
        let g = graph_with(&[5, 9], &[]);
        let guard = &epoch::pin();
        let w = g.raw().locate_vertex(7, guard);
        assert_eq!((w.pred.key, w.curr.key), (5, 9));
        drop(w);
        let w = g.raw().locate_vertex(5, guard);
        assert_eq!((w.pred.key, w.curr.key), (SENTINEL_MIN, 5));
    }

    #[test]
    fn locate_vertex_retries_after_racing_insert() {
        let g = Arc::new(graph_with(&[5, 9], &[]));
        let bp = Breakpoint::new();
        let t = {
            let (g, bp) = (g.clone(), bp.clone());
            thread::spawn(move || {
                arm(HookPoint::LocateVertexBeforeLock, 0, &bp);
                let guard = &epoch::pin();
                let w = g.raw().locate_vertex(7, guard);
                (w.pred.key, w.curr.key)
            })
        };
        assert!(bp.wait_reached(WAIT));
        assert!(g.add_vertex(k(6)));
        bp.release();
        assert_eq!(t.join().unwrap(), (6, 9));
        assert_eq!(g.diagnostics().validation_retries, 1);
    }

    #[test]
    fn help_search_starts_with_the_smaller_key() {
        let g = Arc::new(graph_with(&[5, 7], &[]));
        {
            let guard = &epoch::pin();
            let (u, v) = g.raw().help_search_edge(7, 5, guard).unwrap();
            assert_eq!((u.key, v.key), (7, 5));
        }
        // Park after the first endpoint is found, then remove 5. The search
        // still succeeds only if 5 was the endpoint already checked.
        let bp = Breakpoint::new();
        let t = {
            let (g, bp) = (g.clone(), bp.clone());
            thread::spawn(move || {
                arm(HookPoint::SearchFirstEndpointFound, 0, &bp);
                let guard = &epoch::pin();
                g.raw().help_search_edge(7, 5, guard).map(|(u, v)| (u.key, v.key))
            })
        };
        assert!(bp.wait_reached(WAIT));
        assert!(g.remove_vertex(k(5)));
        bp.release();
        assert_eq!(t.join().unwrap(), Some((7, 5)));
    }

    #[test]
    fn validate_edge_cases() {
        let g = graph_with(&[1, 2, 3], &[(1, 2), (1, 3)]);
        let guard = &epoch::pin();
        let v1 = g.raw().seek_vertex(1, guard);
        let (pred, curr) = RawGraph::seek_edge(v1, 3, guard);
        assert_eq!((pred.key, curr.key), (2, 3));
        assert!(RawGraph::validate_edge(pred, curr, EdgeCheck::Unmarked, guard));
        assert!(RawGraph::validate_edge(pred, curr, EdgeCheck::Confirmed, guard));
        // concurrent unlink of pred's successor
        assert!(g.remove_edge(k(1), k(3)));
        assert!(!RawGraph::validate_edge(pred, curr, EdgeCheck::Unmarked, guard));
    }

    #[test]
    fn validate_edge_fails_after_unlink_and_caller_retries() {
        let g = Arc::new(graph_with(&[1, 2, 3], &[(1, 2), (1, 3)]));
        let bp = Breakpoint::new();
        let t = {
            let (g, bp) = (g.clone(), bp.clone());
            thread::spawn(move || {
                arm(HookPoint::LocateEdgeBeforeLock, 0, &bp);
                g.remove_edge(k(1), k(3))
            })
        };
        assert!(bp.wait_reached(WAIT));
        // the parked remover holds the stale window (2, 3)
        assert!(g.remove_edge(k(1), k(2)));
        bp.release();
        assert!(t.join().unwrap());
        assert_eq!(g.diagnostics().validation_retries, 1);
        assert!(g.snapshot().edges.is_empty());
    }

    #[test]
    fn leak_mode_behaves_the_same() {
        let g = ConcGraph::with_config(GraphConfig::default().with_reclamation(Reclamation::Leak));
        for v in 1..=20 {
            g.add_vertex(k(v));
        }
        for v in 1..20 {
            g.add_edge(k(v), k(v + 1));
        }
        for v in (1..=20).step_by(2) {
            g.remove_vertex_with(k(v), true);
        }
        assert_eq!(g.snapshot().vertices.len(), 10);
        assert!(g.snapshot().edges.is_empty());
        assert!(g.check_structure().is_quiescent_clean());
    }

    #[test]
    fn concurrent_updates_keep_lists_sorted() {
        let g = ConcGraph::with_config(GraphConfig::default().with_die(true));
        thread::scope(|s| {
            for t in 0..4i64 {
                let g = &g;
                s.spawn(move || {
                    for i in 0..2000i64 {
                        let a = (i * 7 + t) % 32 + 1;
                        let b = (i * 13 + 3 * t) % 32 + 1;
                        match i % 6 {
                            0 => {
                                g.add_vertex(k(a));
                            }
                            1 => {
                                g.add_edge(k(a), k(b));
                            }
                            2 => {
                                g.remove_edge(k(a), k(b));
                            }
                            3 => {
                                if i % 24 == 3 {
                                    g.remove_vertex(k(a));
                                }
                            }
                            4 => {
                                g.contains_edge(k(a), k(b));
                            }
                            _ => {
                                g.contains_vertex(k(a));
                            }
                        }
                    }
                });
            }
        });
        let report = g.check_structure();
        assert!(report.is_quiescent_clean(), "{report:?}");
    }
}
