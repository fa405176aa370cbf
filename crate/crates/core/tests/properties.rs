//! Randomized invariants, each checked against an oracle written here.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use concgraph::baselines::{oracle_cycle_check, GraphModel};
use concgraph::verify::History;
use concgraph::{AcyclicGraph, ConcGraph, Flavor, GraphConfig, GraphOps, Key, Op, Snapshot};
use proptest::prelude::*;

const KEYS: i64 = 12;

fn key(v: i64) -> Key {
    Key::new(v).unwrap()
}

fn arb_op() -> impl Strategy<Value = Op> {
    let k = || (1..=KEYS).prop_map(key);
    prop_oneof![
        3 => k().prop_map(Op::AddVertex),
        1 => k().prop_map(Op::RemoveVertex),
        1 => k().prop_map(Op::ContainsVertex),
        4 => (k(), k()).prop_map(|(a, b)| Op::AddEdge(a, b)),
        2 => (k(), k()).prop_map(|(a, b)| Op::RemoveEdge(a, b)),
        2 => (k(), k()).prop_map(|(a, b)| Op::ContainsEdge(a, b)),
    ]
}

/// Drops re-insertions of removed keys, which the graph does not support.
fn without_reuse(ops: Vec<Op>) -> Vec<Op> {
    let mut removed = HashSet::new();
    ops.into_iter()
        .map(|op| match op {
            Op::AddVertex(k) if removed.contains(&k) => Op::ContainsVertex(k),
            Op::RemoveVertex(k) => {
                removed.insert(k);
                op
            }
            _ => op,
        })
        .collect()
}

/// Straightforward reference semantics, independent of the library's model.
#[derive(Default)]
struct Reference {
    adj: BTreeMap<Key, BTreeSet<Key>>,
}

impl Reference {
    fn reaches(&self, from: Key, to: Key) -> bool {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &b in self.adj.get(&u).into_iter().flatten() {
                if b == to {
                    return true;
                }
                if seen.insert(b) {
                    queue.push_back(b);
                }
            }
        }
        false
    }

    fn apply(&mut self, flavor: Flavor, op: Op) -> bool {
        let live = |r: &Self, k| r.adj.contains_key(&k);
        match op {
            Op::AddVertex(k) => {
                self.adj.entry(k).or_default();
                true
            }
            Op::RemoveVertex(k) => {
                let was = self.adj.remove(&k).is_some();
                for out in self.adj.values_mut() {
                    out.remove(&k);
                }
                was
            }
            Op::ContainsVertex(k) => live(self, k),
            Op::AddEdge(a, b) => {
                if !live(self, a) || !live(self, b) {
                    return false;
                }
                if self.adj[&a].contains(&b) {
                    return true;
                }
                if flavor == Flavor::Acyclic && (a == b || self.reaches(b, a)) {
                    return false;
                }
                self.adj.get_mut(&a).unwrap().insert(b);
                true
            }
            Op::RemoveEdge(a, b) => {
                if !live(self, a) || !live(self, b) {
                    return false;
                }
                self.adj.get_mut(&a).unwrap().remove(&b);
                true
            }
            Op::ContainsEdge(a, b) => live(self, a) && live(self, b) && self.adj[&a].contains(&b),
        }
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            vertices: self.adj.keys().copied().collect(),
            edges: self.adj.iter().flat_map(|(&a, out)| out.iter().map(move |&b| (a, b))).collect(),
        }
    }
}

/// Kahn's algorithm: a cycle exists iff some vertex is never freed.
fn has_cycle(s: &Snapshot) -> bool {
    let mut indeg: BTreeMap<Key, usize> = s.vertices.iter().map(|&v| (v, 0)).collect();
    for &(_, b) in &s.edges {
        *indeg.get_mut(&b).unwrap() += 1;
    }
    let mut ready: Vec<Key> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
    let mut freed = 0;
    while let Some(u) = ready.pop() {
        freed += 1;
        for &(a, b) in &s.edges {
            if a == u {
                let d = indeg.get_mut(&b).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(b);
                }
            }
        }
    }
    freed < s.vertices.len()
}

fn replay<G: GraphOps>(g: &G, ops: &[Op]) -> Result<(), TestCaseError> {
    let mut reference = Reference::default();
    for (i, &op) in ops.iter().enumerate() {
        let want = reference.apply(g.flavor(), op);
        prop_assert_eq!(g.apply(op), want, "op {} {}", i, op);
    }
    prop_assert_eq!(g.snapshot(), reference.snapshot());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn plain_graph_matches_reference(ops in prop::collection::vec(arb_op(), 0..200), die in any::<bool>()) {
        let g = ConcGraph::with_config(GraphConfig::default().with_die(die));
        replay(&g, &without_reuse(ops))?;
        let report = g.check_structure();
        prop_assert!(report.sorted);
    }

    #[test]
    fn acyclic_graph_matches_reference(ops in prop::collection::vec(arb_op(), 0..200), die in any::<bool>()) {
        let g = AcyclicGraph::with_config(GraphConfig::default().with_die(die));
        replay(&g, &without_reuse(ops))?;
        prop_assert!(!has_cycle(&g.snapshot()));
        prop_assert_eq!(g.diagnostics().false_positives, 0);
    }

    #[test]
    fn model_matches_reference(ops in prop::collection::vec(arb_op(), 0..200), acyclic in any::<bool>()) {
        let flavor = if acyclic { Flavor::Acyclic } else { Flavor::Plain };
        let mut model = GraphModel::new();
        let mut reference = Reference::default();
        for op in ops {
            prop_assert_eq!(model.apply(flavor, op), reference.apply(flavor, op), "{}", op);
        }
        prop_assert_eq!(model.snapshot(), reference.snapshot());
    }

    #[test]
    fn path_exists_matches_bfs(
        edges in prop::collection::vec((1..=KEYS, 1..=KEYS), 0..40),
        removed in prop::collection::vec(1..=KEYS, 0..3),
        queries in prop::collection::vec((1..=KEYS, 1..=KEYS), 1..20),
    ) {
        let g = AcyclicGraph::new();
        let mut reference = Reference::default();
        for v in 1..=KEYS {
            g.add_vertex(key(v));
            reference.apply(Flavor::Acyclic, Op::AddVertex(key(v)));
        }
        for (a, b) in edges {
            g.acyclic_add_edge(key(a), key(b));
            reference.apply(Flavor::Acyclic, Op::AddEdge(key(a), key(b)));
        }
        for v in removed {
            g.remove_vertex(key(v));
            reference.apply(Flavor::Acyclic, Op::RemoveVertex(key(v)));
        }
        for (a, b) in queries {
            let (a, b) = (key(a), key(b));
            if reference.adj.contains_key(&a) && reference.adj.contains_key(&b) {
                prop_assert_eq!(g.path_exists(a, b), reference.reaches(a, b), "{} -> {}", a, b);
            }
        }
    }

    #[test]
    fn cycle_oracle_agrees_with_kahn(edges in prop::collection::vec((1..=8i64, 1..=8i64), 0..16)) {
        let mut s = Snapshot {
            vertices: (1..=8).map(key).collect(),
            edges: edges.into_iter().map(|(a, b)| (key(a), key(b))).collect(),
        };
        s.edges.sort();
        s.edges.dedup();
        prop_assert_eq!(oracle_cycle_check(&s), has_cycle(&s));
    }

    #[test]
    fn key_ascending_graphs_are_acyclic(edges in prop::collection::vec((1..=30i64, 1..=30i64), 0..80)) {
        let mut s = Snapshot { vertices: (1..=30).map(key).collect(), edges: Vec::new() };
        s.edges = edges.into_iter().filter(|(a, b)| a < b).map(|(a, b)| (key(a), key(b))).collect();
        s.edges.sort();
        s.edges.dedup();
        prop_assert!(!oracle_cycle_check(&s));
    }

    #[test]
    fn history_text_round_trips(ops in prop::collection::vec(arb_op(), 1..30), acyclic in any::<bool>()) {
        let flavor = if acyclic { Flavor::Acyclic } else { Flavor::Plain };
        let mut h = History::new(flavor);
        for (i, op) in ops.into_iter().enumerate() {
            h.call((i % 3) as u32, op, i % 2 == 0);
        }
        let back: History = h.to_text().parse().unwrap();
        prop_assert_eq!(back, h);
    }
}
