use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::key::Key;
use crate::ops::{Flavor, Op, Snapshot};

/// The sequential specification as a plain value.
///
/// Every method returns exactly what the concurrent graphs must return when
/// the same calls are made one at a time. Removing a vertex drops its
/// incoming and outgoing edges. `Clone + Hash + Eq` so the linearizability
/// checker can memoize on it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GraphModel {
    adj: BTreeMap<Key, BTreeSet<Key>>,
}

impl GraphModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, k: Key) -> bool {
        self.adj.entry(k).or_default();
        true
    }

    pub fn remove_vertex(&mut self, k: Key) -> bool {
        if self.adj.remove(&k).is_none() {
            return false;
        }
        for out in self.adj.values_mut() {
            out.remove(&k);
        }
        true
    }

    pub fn contains_vertex(&self, k: Key) -> bool {
        self.adj.contains_key(&k)
    }

    fn both_live(&self, from: Key, to: Key) -> bool {
        self.adj.contains_key(&from) && self.adj.contains_key(&to)
    }

    pub fn add_edge(&mut self, from: Key, to: Key) -> bool {
        if !self.both_live(from, to) {
            return false;
        }
        self.adj.get_mut(&from).unwrap().insert(to);
        true
    }

    pub fn remove_edge(&mut self, from: Key, to: Key) -> bool {
        if !self.both_live(from, to) {
            return false;
        }
        self.adj.get_mut(&from).unwrap().remove(&to);
        true
    }

    pub fn contains_edge(&self, from: Key, to: Key) -> bool {
        self.adj.get(&from).is_some_and(|out| out.contains(&to)) && self.adj.contains_key(&to)
    }

    /// Rejects the edge up front if it would close a cycle; no provisional
    /// state is needed without concurrency.
    pub fn acyclic_add_edge(&mut self, from: Key, to: Key) -> bool {
        if !self.both_live(from, to) {
            return false;
        }
        if self.contains_edge(from, to) {
            return true;
        }
        if self.closes_cycle(from, to) {
            return false;
        }
        self.adj.get_mut(&from).unwrap().insert(to);
        true
    }

    /// Whether inserting `from -> to` would create a directed cycle.
    pub fn closes_cycle(&self, from: Key, to: Key) -> bool {
        from == to || self.reaches(to, from)
    }

    /// Breadth-first reachability over at least one edge.
    pub fn reaches(&self, from: Key, to: Key) -> bool {
        let Some(start) = self.adj.get(&from) else {
            return false;
        };
        let mut seen: BTreeSet<Key> = BTreeSet::new();
        let mut queue: VecDeque<Key> = start.iter().copied().collect();
        while let Some(k) = queue.pop_front() {
            if k == to {
                return true;
            }
            if !seen.insert(k) {
                continue;
            }
            if let Some(out) = self.adj.get(&k) {
                queue.extend(out.iter().copied().filter(|n| !seen.contains(n)));
            }
        }
        false
    }

    pub fn apply(&mut self, flavor: Flavor, op: Op) -> bool {
        match (flavor, op) {
            (_, Op::AddVertex(k)) => self.add_vertex(k),
            (_, Op::RemoveVertex(k)) => self.remove_vertex(k),
            (_, Op::ContainsVertex(k)) => self.contains_vertex(k),
            (Flavor::Plain, Op::AddEdge(a, b)) => self.add_edge(a, b),
            (Flavor::Acyclic, Op::AddEdge(a, b)) => self.acyclic_add_edge(a, b),
            (_, Op::RemoveEdge(a, b)) => self.remove_edge(a, b),
            (_, Op::ContainsEdge(a, b)) => self.contains_edge(a, b),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Key> + '_ {
        self.adj.keys().copied()
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            vertices: self.adj.keys().copied().collect(),
            edges: self
                .adj
                .iter()
                .flat_map(|(&a, out)| out.iter().map(move |&b| (a, b)))
                .collect(),
        }
    }
}
