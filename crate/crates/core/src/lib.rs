//! A concurrent directed graph built from sorted lazy linked lists.
//!
//! [`ConcGraph`] supports vertex and edge insertion and removal from any
//! number of threads, with lock-free, wait-free membership queries.
//! [`AcyclicGraph`] additionally refuses edges that would close a directed
//! cycle, using a lock-free reachability check.
//!
//! The crate also carries sequential and coarse-locked baselines
//! ([`baselines`]), a linearizability and acyclicity harness ([`verify`]) and
//! the throughput workload driver ([`workload`]).
//!
//! ```
//! use concgraph::{AcyclicGraph, Key};
//!
//! let g = AcyclicGraph::new();
//! let k = |v| Key::new(v).unwrap();
//! for v in 1..=3 {
//!     g.add_vertex(k(v));
//! }
//! assert!(g.acyclic_add_edge(k(1), k(2)));
//! assert!(g.acyclic_add_edge(k(2), k(3)));
//! assert!(!g.acyclic_add_edge(k(3), k(1)));
//! assert!(g.path_exists(k(1), k(3)));
//! ```

pub mod acyclic;
pub mod baselines;
mod diag;
pub mod graph;
pub mod hooks;
mod key;
mod node;
mod ops;
pub mod verify;
pub mod workload;

pub use acyclic::AcyclicGraph;
pub use diag::Diagnostics;
pub use graph::{ConcGraph, GraphConfig, Reclamation, StructureReport};
pub use key::{Key, KeyError, SENTINEL_MAX, SENTINEL_MIN};
pub use node::{status_write_monitor, EdgeStatus};
pub use ops::{Flavor, GraphOps, Op, Snapshot};
