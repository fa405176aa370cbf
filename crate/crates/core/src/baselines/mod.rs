//! Reference implementations behind the same [`GraphOps`](crate::GraphOps)
//! interface, plus the oracles the tests treat as ground truth.

mod coarse;
mod model;
mod oracle;
mod sequential;

pub use coarse::CoarseLockGraph;
pub use model::GraphModel;
pub use oracle::{bfs_reachable, oracle_cycle_check};
pub use sequential::SequentialGraph;
