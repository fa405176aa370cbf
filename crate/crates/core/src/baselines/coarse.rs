use parking_lot::Mutex;

use super::GraphModel;
use crate::key::Key;
use crate::ops::{Flavor, GraphOps, Snapshot};

/// Reference graph guarded by one global lock; every operation runs
/// entirely inside it.
#[derive(Debug)]
pub struct CoarseLockGraph {
    flavor: Flavor,
    model: Mutex<GraphModel>,
}

impl CoarseLockGraph {
    pub fn new(flavor: Flavor) -> Self {
        CoarseLockGraph {
            flavor,
            model: Mutex::new(GraphModel::new()),
        }
    }

    pub fn path_exists(&self, from: Key, to: Key) -> bool {
        self.model.lock().reaches(from, to)
    }
}

impl GraphOps for CoarseLockGraph {
    fn flavor(&self) -> Flavor {
        self.flavor
    }
    fn add_vertex(&self, k: Key) -> bool {
        self.model.lock().add_vertex(k)
    }
    fn remove_vertex(&self, k: Key) -> bool {
        self.model.lock().remove_vertex(k)
    }
    fn contains_vertex(&self, k: Key) -> bool {
        self.model.lock().contains_vertex(k)
    }
    fn add_edge(&self, from: Key, to: Key) -> bool {
        let mut m = self.model.lock();
        match self.flavor {
            Flavor::Plain => m.add_edge(from, to),
            Flavor::Acyclic => m.acyclic_add_edge(from, to),
        }
    }
    fn remove_edge(&self, from: Key, to: Key) -> bool {
        self.model.lock().remove_edge(from, to)
    }
    fn contains_edge(&self, from: Key, to: Key) -> bool {
        self.model.lock().contains_edge(from, to)
    }
    fn snapshot(&self) -> Snapshot {
        self.model.lock().snapshot()
    }
}
