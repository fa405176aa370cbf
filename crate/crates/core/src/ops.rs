use std::fmt;

use crate::key::Key;

/// Which sequential specification a graph follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Any edge between live vertices may be inserted.
    Plain,
    /// Edge insertion fails rather than close a directed cycle.
    Acyclic,
}

/// One of the six public graph operations.
///
/// On an acyclic graph the three edge operations mean their acyclic
/// counterparts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    AddVertex(Key),
    RemoveVertex(Key),
    ContainsVertex(Key),
    AddEdge(Key, Key),
    RemoveEdge(Key, Key),
    ContainsEdge(Key, Key),
}

impl Op {
    pub fn is_update(&self) -> bool {
        !matches!(self, Op::ContainsVertex(_) | Op::ContainsEdge(..))
    }

    pub fn keys(&self) -> (Key, Option<Key>) {
        match *self {
            Op::AddVertex(k) | Op::RemoveVertex(k) | Op::ContainsVertex(k) => (k, None),
            Op::AddEdge(a, b) | Op::RemoveEdge(a, b) | Op::ContainsEdge(a, b) => (a, Some(b)),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::AddVertex(k) => write!(f, "AddVertex({k})"),
            Op::RemoveVertex(k) => write!(f, "RemoveVertex({k})"),
            Op::ContainsVertex(k) => write!(f, "ContainsVertex({k})"),
            Op::AddEdge(a, b) => write!(f, "AddEdge({a},{b})"),
            Op::RemoveEdge(a, b) => write!(f, "RemoveEdge({a},{b})"),
            Op::ContainsEdge(a, b) => write!(f, "ContainsEdge({a},{b})"),
        }
    }
}

/// The abstract graph at one instant: live vertices and the confirmed edges
/// between them, both sorted ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Snapshot {
    pub vertices: Vec<Key>,
    pub edges: Vec<(Key, Key)>,
}

impl Snapshot {
    pub fn contains_vertex(&self, k: Key) -> bool {
        self.vertices.binary_search(&k).is_ok()
    }

    pub fn contains_edge(&self, from: Key, to: Key) -> bool {
        self.edges.binary_search(&(from, to)).is_ok()
    }
}

/// The interface shared by the concurrent graphs and the baselines.
pub trait GraphOps {
    fn flavor(&self) -> Flavor;

    fn add_vertex(&self, k: Key) -> bool;
    fn remove_vertex(&self, k: Key) -> bool;
    fn contains_vertex(&self, k: Key) -> bool;
    fn add_edge(&self, from: Key, to: Key) -> bool;
    fn remove_edge(&self, from: Key, to: Key) -> bool;
    fn contains_edge(&self, from: Key, to: Key) -> bool;

    /// Only meaningful when no update is in flight.
    fn snapshot(&self) -> Snapshot;

    fn apply(&self, op: Op) -> bool {
        match op {
            Op::AddVertex(k) => self.add_vertex(k),
            Op::RemoveVertex(k) => self.remove_vertex(k),
            Op::ContainsVertex(k) => self.contains_vertex(k),
            Op::AddEdge(a, b) => self.add_edge(a, b),
            Op::RemoveEdge(a, b) => self.remove_edge(a, b),
            Op::ContainsEdge(a, b) => self.contains_edge(a, b),
        }
    }
}

impl<G: GraphOps + ?Sized> GraphOps for &G {
    fn flavor(&self) -> Flavor {
        (**self).flavor()
    }
    fn add_vertex(&self, k: Key) -> bool {
        (**self).add_vertex(k)
    }
    fn remove_vertex(&self, k: Key) -> bool {
        (**self).remove_vertex(k)
    }
    fn contains_vertex(&self, k: Key) -> bool {
        (**self).contains_vertex(k)
    }
    fn add_edge(&self, from: Key, to: Key) -> bool {
        (**self).add_edge(from, to)
    }
    fn remove_edge(&self, from: Key, to: Key) -> bool {
        (**self).remove_edge(from, to)
    }
    fn contains_edge(&self, from: Key, to: Key) -> bool {
        (**self).contains_edge(from, to)
    }
    fn snapshot(&self) -> Snapshot {
        (**self).snapshot()
    }
}
