//! Independent checks over a snapshot, used as ground truth by the tests.

use std::collections::{HashMap, VecDeque};

use crate::key::Key;
use crate::ops::Snapshot;

fn adjacency(s: &Snapshot) -> HashMap<Key, Vec<Key>> {
    let mut adj: HashMap<Key, Vec<Key>> = s.vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &(a, b) in &s.edges {
        adj.entry(a).or_default().push(b);
    }
    adj
}

/// True iff the snapshot's edges contain a directed cycle.
///
/// Iterative three-colour depth-first search.
pub fn oracle_cycle_check(s: &Snapshot) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Colour {
        White,
        Grey,
        Black,
    }
    let adj = adjacency(s);
    let mut colour: HashMap<Key, Colour> = adj.keys().map(|&k| (k, Colour::White)).collect();
    for &root in adj.keys() {
        if colour[&root] != Colour::White {
            continue;
        }
        let mut stack: Vec<(Key, usize)> = vec![(root, 0)];
        colour.insert(root, Colour::Grey);
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            let out = &adj[&node];
            if *next < out.len() {
                let child = out[*next];
                *next += 1;
                match colour.get(&child).copied().unwrap_or(Colour::Black) {
                    Colour::Grey => return true,
                    Colour::White => {
                        colour.insert(child, Colour::Grey);
                        stack.push((child, 0));
                    }
                    Colour::Black => {}
                }
            } else {
                colour.insert(node, Colour::Black);
                stack.pop();
            }
        }
    }
    false
}

/// Breadth-first search: is `to` reachable from `from` over at least one edge?
pub fn bfs_reachable(s: &Snapshot, from: Key, to: Key) -> bool {
    let adj = adjacency(s);
    if !adj.contains_key(&from) {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::new();
    queue.push_back(from);
    while let Some(n) = queue.pop_front() {
        for &m in adj.get(&n).map(Vec::as_slice).unwrap_or(&[]) {
            if m == to {
                return true;
            }
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    false
}
