//! List cells shared by the plain and the acyclic graph.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicU8, Ordering};

use crossbeam_epoch::{self as epoch, Atomic, Guard, Owned, Shared};
use parking_lot::lock_api::RawMutex as _;
use parking_lot::RawMutex;

use crate::key::{SENTINEL_MAX, SENTINEL_MIN};

/// Lifecycle of an edge node.
///
/// The plain graph only uses `Added` and `Marked`; the acyclic graph inserts
/// edges as `Transit` and resolves them after its reachability check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum EdgeStatus {
    Transit = 0,
    Marked = 1,
    Added = 2,
}

impl EdgeStatus {
    fn from_u8(v: u8) -> Self {
        match v {
            0 => EdgeStatus::Transit,
            1 => EdgeStatus::Marked,
            _ => EdgeStatus::Added,
        }
    }

    /// Transit→Added, Transit→Marked and Added→Marked; Marked is terminal.
    pub fn can_become(self, next: EdgeStatus) -> bool {
        matches!(
            (self, next),
            (EdgeStatus::Transit, EdgeStatus::Added)
                | (EdgeStatus::Transit, EdgeStatus::Marked)
                | (EdgeStatus::Added, EdgeStatus::Marked)
        )
    }
}

static STATUS_WRITES: AtomicU64 = AtomicU64::new(0);
static ILLEGAL_STATUS_WRITES: AtomicU64 = AtomicU64::new(0);

/// Process-wide count of edge status writes and of those that broke the
/// lifecycle. The second number must stay zero.
pub fn status_write_monitor() -> (u64, u64) {
    (
        STATUS_WRITES.load(Ordering::Relaxed),
        ILLEGAL_STATUS_WRITES.load(Ordering::Relaxed),
    )
}

pub(crate) trait Lockable {
    fn raw_lock(&self) -> &RawMutex;
}

pub(crate) struct EdgeNode {
    pub(crate) key: i64,
    status: AtomicU8,
    pub(crate) next: Atomic<EdgeNode>,
    lock: RawMutex,
}

impl EdgeNode {
    pub(crate) fn new(key: i64, status: EdgeStatus) -> Self {
        EdgeNode {
            key,
            status: AtomicU8::new(status as u8),
            next: Atomic::null(),
            lock: RawMutex::INIT,
        }
    }

    #[inline]
    pub(crate) fn status(&self) -> EdgeStatus {
        EdgeStatus::from_u8(self.status.load(Ordering::SeqCst))
    }

    #[inline]
    pub(crate) fn is_marked(&self) -> bool {
        self.status() == EdgeStatus::Marked
    }

    pub(crate) fn transition(&self, next: EdgeStatus) {
        let prev = EdgeStatus::from_u8(self.status.swap(next as u8, Ordering::SeqCst));
        STATUS_WRITES.fetch_add(1, Ordering::Relaxed);
        if !prev.can_become(next) {
            ILLEGAL_STATUS_WRITES.fetch_add(1, Ordering::Relaxed);
        }
    }

    #[inline]
    pub(crate) fn is_tail(&self) -> bool {
        self.key == SENTINEL_MAX
    }
}

impl Lockable for EdgeNode {
    fn raw_lock(&self) -> &RawMutex {
        &self.lock
    }
}

pub(crate) struct VertexNode {
    pub(crate) key: i64,
    marked: AtomicBool,
    pub(crate) next: Atomic<VertexNode>,
    /// Head sentinel of this vertex's edge list. The tail sentinel is the
    /// last node of the chain.
    pub(crate) edges: EdgeNode,
    lock: RawMutex,
}

impl VertexNode {
    pub(crate) fn new(key: i64) -> Self {
        let edges = EdgeNode::new(SENTINEL_MIN, EdgeStatus::Added);
        edges
            .next
            .store(Owned::new(EdgeNode::new(SENTINEL_MAX, EdgeStatus::Added)), Ordering::Relaxed);
        VertexNode {
            key,
            marked: AtomicBool::new(false),
            next: Atomic::null(),
            edges,
            lock: RawMutex::INIT,
        }
    }

    #[inline]
    pub(crate) fn is_marked(&self) -> bool {
        self.marked.load(Ordering::SeqCst)
    }

    #[inline]
    pub(crate) fn mark(&self) {
        self.marked.store(true, Ordering::SeqCst);
    }
}

impl Lockable for VertexNode {
    fn raw_lock(&self) -> &RawMutex {
        &self.lock
    }
}

impl Drop for VertexNode {
    fn drop(&mut self) {
        // Only runs once no thread can reach this vertex, so its edge chain
        // is private to us. Unlinked edge nodes were retired on their own.
        unsafe {
            let guard = epoch::unprotected();
            let mut cur = self.edges.next.load(Ordering::Relaxed, guard);
            while !cur.is_null() {
                let next = cur.deref().next.load(Ordering::Relaxed, guard);
                drop(cur.into_owned());
                cur = next;
            }
        }
    }
}

/// Loads `next` and borrows the target for the lifetime of the guard.
///
/// Every list ends in a tail sentinel whose key stops every traversal, so
/// callers never dereference past it.
#[inline]
pub(crate) fn load<'g, T>(link: &Atomic<T>, guard: &'g Guard) -> &'g T {
    let shared = link.load(Ordering::SeqCst, guard);
    debug_assert!(!shared.is_null());
    // Nodes reachable while pinned are only destroyed after the guard drops.
    unsafe { shared.deref() }
}

#[inline]
pub(crate) fn points_to<T>(link: &Atomic<T>, target: &T, guard: &Guard) -> bool {
    std::ptr::eq(link.load(Ordering::SeqCst, guard).as_raw(), target)
}

#[inline]
pub(crate) fn shared<'g, T>(node: &'g T) -> Shared<'g, T> {
    Shared::from(node as *const T)
}

/// Two adjacent nodes locked in list order; both locks drop together.
pub(crate) struct Window<'g, N: Lockable> {
    pub(crate) pred: &'g N,
    pub(crate) curr: &'g N,
}

impl<'g, N: Lockable> Window<'g, N> {
    /// Locks `pred` then `curr`. Keys strictly increase along a list, so
    /// every thread acquires in ascending key order.
    pub(crate) fn lock(pred: &'g N, curr: &'g N) -> Self {
        pred.raw_lock().lock();
        curr.raw_lock().lock();
        Window { pred, curr }
    }
}

impl<N: Lockable> Drop for Window<'_, N> {
    fn drop(&mut self) {
        unsafe {
            self.pred.raw_lock().unlock();
            self.curr.raw_lock().unlock();
        }
    }
}
