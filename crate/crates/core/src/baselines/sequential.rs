use std::cell::RefCell;

use super::GraphModel;
use crate::key::Key;
use crate::ops::{Flavor, GraphOps, Snapshot};

/// Unsynchronized reference graph. Not `Sync`, so it cannot be shared
/// between threads.
#[derive(Debug)]
pub struct SequentialGraph {
    flavor: Flavor,
    model: RefCell<GraphModel>,
}

impl SequentialGraph {
    pub fn new(flavor: Flavor) -> Self {
        SequentialGraph {
            flavor,
            model: RefCell::new(GraphModel::new()),
        }
    }

    pub fn into_model(self) -> GraphModel {
        self.model.into_inner()
    }
}

impl GraphOps for SequentialGraph {
    fn flavor(&self) -> Flavor {
        self.flavor
    }
    fn add_vertex(&self, k: Key) -> bool {
        self.model.borrow_mut().add_vertex(k)
    }
    fn remove_vertex(&self, k: Key) -> bool {
        self.model.borrow_mut().remove_vertex(k)
    }
    fn contains_vertex(&self, k: Key) -> bool {
        self.model.borrow().contains_vertex(k)
    }
    fn add_edge(&self, from: Key, to: Key) -> bool {
        let mut m = self.model.borrow_mut();
        match self.flavor {
            Flavor::Plain => m.add_edge(from, to),
            Flavor::Acyclic => m.acyclic_add_edge(from, to),
        }
    }
    fn remove_edge(&self, from: Key, to: Key) -> bool {
        self.model.borrow_mut().remove_edge(from, to)
    }
    fn contains_edge(&self, from: Key, to: Key) -> bool {
        self.model.borrow().contains_edge(from, to)
    }
    fn snapshot(&self) -> Snapshot {
        self.model.borrow().snapshot()
    }
}
