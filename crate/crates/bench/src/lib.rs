//! Fixtures shared by the benchmarks.

use concgraph::workload::{seed_initial_graph, InitialGraph};
use concgraph::{AcyclicGraph, ConcGraph, GraphOps, Key};

pub fn key(v: i64) -> Key {
    Key::new(v).expect("benchmark keys are small")
}

/// Vertices `1..=n` and every key-ascending edge with probability `density`.
pub fn seeded<G: GraphOps>(g: G, n: u32, density: f64) -> G {
    seed_initial_graph(&g, InitialGraph { vertices: n, density }, 42);
    g
}

pub fn plain(n: u32, density: f64) -> ConcGraph {
    seeded(ConcGraph::new(), n, density)
}

pub fn acyclic(n: u32, density: f64) -> AcyclicGraph {
    seeded(AcyclicGraph::new(), n, density)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_the_requested_shape() {
        let g = plain(10, 1.0);
        let s = g.snapshot();
        assert_eq!(s.vertices.len(), 10);
        assert_eq!(s.edges.len(), 45);
        assert_eq!(acyclic(10, 0.0).snapshot().edges.len(), 0);
    }
}
