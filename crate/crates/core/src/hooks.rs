//! Pause points inside the graph algorithms.
//!
//! With the `test-hooks` feature a test thread can [`arm`] a [`Breakpoint`]
//! at a [`HookPoint`]; the next time that same thread reaches the point it
//! parks until the test calls [`Breakpoint::release`]. Other threads are never
//! affected. A thread may also opt into [`set_chaos`], which makes it yield
//! its time slice at random hook points to shake out more interleavings.
//! Without the feature every call to `hit` compiles to nothing.

/// Named locations inside the graph algorithms where a thread can be parked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HookPoint {
    /// `locate_vertex` found its window but has not locked it yet.
    LocateVertexBeforeLock,
    /// `add_vertex`/`remove_vertex` hold the validated vertex window locks.
    VertexWindowLocked,
    /// `remove_vertex` unlinked the vertex and released its locks.
    VertexUnlinked,
    /// `help_search_edge` found the smaller-keyed endpoint.
    SearchFirstEndpointFound,
    /// `help_search_edge` read the next node while looking for the larger key.
    SearchSecondEndpointStep,
    /// `locate_edge` passed the second liveness check of both endpoints.
    EndpointsRechecked,
    /// `locate_edge` found its edge window but has not locked it yet.
    LocateEdgeBeforeLock,
    /// An edge update holds the validated edge window locks.
    EdgeWindowLocked,
    /// `contains_vertex` finished its traversal and is about to test the node.
    ContainsVertexLocated,
    /// `contains_edge` verified both endpoints.
    ContainsEdgeEndpointsFound,
    /// `contains_edge` finished the edge-list traversal and is about to test the node.
    ContainsEdgeLocated,
    /// `acyclic_add_edge` linked a Transit node and released its locks.
    TransitLinked,
    /// `acyclic_add_edge` finished the reachability check.
    CycleChecked,
    /// `new_locate_edge` found the rollback window but has not locked it yet.
    RollbackBeforeLock,
    /// `path_exists` is about to expand the next unexplored key.
    PathExpand,
}

#[cfg(feature = "test-hooks")]
mod imp {
    use std::cell::{Cell, RefCell};
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;
    use std::time::{Duration, Instant};

    use parking_lot::{Condvar, Mutex};

    use super::HookPoint;

    static ARMED: AtomicUsize = AtomicUsize::new(0);
    static CHAOTIC: AtomicUsize = AtomicUsize::new(0);

    thread_local! {
        static PENDING: RefCell<Vec<Armed>> = const { RefCell::new(Vec::new()) };
        static CHAOS: Cell<Option<(u32, u64)>> = const { Cell::new(None) };
    }

    struct Armed {
        point: HookPoint,
        skip: usize,
        gate: Breakpoint,
    }

    #[derive(Default)]
    struct GateState {
        reached: bool,
        released: bool,
    }

    #[derive(Default)]
    struct Gate {
        state: Mutex<GateState>,
        cond: Condvar,
    }

    /// A one-shot rendezvous between a parked worker and the test driving it.
    #[derive(Clone, Default)]
    pub struct Breakpoint(Arc<Gate>);

    impl Breakpoint {
        pub fn new() -> Self {
            Self::default()
        }

        /// Blocks until the armed thread parks here, or the timeout elapses.
        pub fn wait_reached(&self, timeout: Duration) -> bool {
            let deadline = Instant::now() + timeout;
            let mut st = self.0.state.lock();
            while !st.reached {
                if self.0.cond.wait_until(&mut st, deadline).timed_out() {
                    return st.reached;
                }
            }
            true
        }

        pub fn is_reached(&self) -> bool {
            self.0.state.lock().reached
        }

        pub fn release(&self) {
            let mut st = self.0.state.lock();
            st.released = true;
            self.0.cond.notify_all();
        }

        fn park(&self) {
            let mut st = self.0.state.lock();
            st.reached = true;
            self.0.cond.notify_all();
            while !st.released {
                self.0.cond.wait(&mut st);
            }
        }
    }

    /// Parks the calling thread at the `skip + 1`-th hit of `point`.
    pub fn arm(point: HookPoint, skip: usize, gate: &Breakpoint) {
        ARMED.fetch_add(1, Ordering::SeqCst);
        PENDING.with(|p| {
            p.borrow_mut().push(Armed {
                point,
                skip,
                gate: gate.clone(),
            })
        });
    }

    /// Drops every breakpoint the calling thread armed but never reached.
    pub fn disarm_all() {
        PENDING.with(|p| {
            let n = p.borrow_mut().drain(..).count();
            ARMED.fetch_sub(n, Ordering::SeqCst);
        });
    }

    /// Makes the calling thread yield at each hook point with probability
    /// `per_mille / 1000`; `0` turns it off again.
    pub fn set_chaos(per_mille: u32, seed: u64) {
        let was = CHAOS.with(|c| c.replace((per_mille > 0).then_some((per_mille, seed | 1))));
        match (was.is_some(), per_mille > 0) {
            (false, true) => {
                CHAOTIC.fetch_add(1, Ordering::SeqCst);
            }
            (true, false) => {
                CHAOTIC.fetch_sub(1, Ordering::SeqCst);
            }
            _ => {}
        }
    }

    fn maybe_yield() {
        let go = CHAOS.with(|c| {
            let Some((p, mut x)) = c.get() else {
                return false;
            };
            // xorshift64
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            c.set(Some((p, x)));
            (x % 1000) < p as u64
        });
        if go {
            std::thread::yield_now();
        }
    }

    #[inline]
    pub fn hit(point: HookPoint) {
        if CHAOTIC.load(Ordering::Relaxed) != 0 {
            maybe_yield();
        }
        if ARMED.load(Ordering::Relaxed) == 0 {
            return;
        }
        let gate = PENDING.with(|p| {
            let mut p = p.borrow_mut();
            let idx = p.iter().position(|a| a.point == point)?;
            if p[idx].skip > 0 {
                p[idx].skip -= 1;
                return None;
            }
            Some(p.remove(idx).gate)
        });
        if let Some(gate) = gate {
            ARMED.fetch_sub(1, Ordering::SeqCst);
            gate.park();
        }
    }
}

#[cfg(feature = "test-hooks")]
pub use imp::{arm, disarm_all, hit, set_chaos, Breakpoint};

#[cfg(not(feature = "test-hooks"))]
#[inline(always)]
pub(crate) fn hit(_point: HookPoint) {}

#[cfg(all(test, feature = "test-hooks"))]
mod tests {
    use std::time::Duration;

    use super::*;

    #[test]
    fn armed_thread_parks_until_released() {
        let bp = Breakpoint::new();
        let worker = {
            let bp = bp.clone();
            std::thread::spawn(move || {
                arm(HookPoint::PathExpand, 1, &bp);
                hit(HookPoint::PathExpand);
                hit(HookPoint::PathExpand);
                7
            })
        };
        assert!(bp.wait_reached(Duration::from_secs(5)));
        assert!(!worker.is_finished());
        bp.release();
        assert_eq!(worker.join().unwrap(), 7);
    }

    #[test]
    fn other_threads_pass_through() {
        let bp = Breakpoint::new();
        arm(HookPoint::CycleChecked, 0, &bp);
        std::thread::spawn(|| hit(HookPoint::CycleChecked))
            .join()
            .unwrap();
        assert!(!bp.is_reached());
        disarm_all();
    }
}
