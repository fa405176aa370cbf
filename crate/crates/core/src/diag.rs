use std::cell::Cell;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use crossbeam_utils::CachePadded;

const SHARDS: usize = 16;

static NEXT_SHARD: AtomicUsize = AtomicUsize::new(0);

thread_local! {
    static SHARD: Cell<usize> = Cell::new(NEXT_SHARD.fetch_add(1, Ordering::Relaxed) % SHARDS);
}

/// Counter split across cache lines so that hot paths on different threads
/// do not contend on one word.
pub(crate) struct StripedCounter {
    shards: Box<[CachePadded<AtomicU64>]>,
}

impl StripedCounter {
    pub(crate) fn new() -> Self {
        StripedCounter {
            shards: (0..SHARDS).map(|_| CachePadded::new(AtomicU64::new(0))).collect(),
        }
    }

    #[inline]
    pub(crate) fn add(&self, n: u64) {
        let i = SHARD.with(Cell::get);
        self.shards[i].fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn sum(&self) -> u64 {
        self.shards.iter().map(|s| s.load(Ordering::Relaxed)).sum()
    }
}

/// Read-only view of a graph's counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Lock windows that failed validation and were retried.
    pub validation_retries: u64,
    /// Operations whose retries exceeded the configured budget.
    pub budget_overruns: u64,
    /// Reachability checks run by the acyclic edge insertion.
    pub cycle_checks: u64,
    /// Acyclic insertions rolled back because a path closed a cycle.
    pub cycle_rejections: u64,
    /// Rejections where no path existed over confirmed edges alone, i.e. the
    /// cycle ran through another thread's provisional edge.
    pub false_positives: u64,
}

pub(crate) struct Stats {
    pub(crate) validation_retries: StripedCounter,
    pub(crate) budget_overruns: StripedCounter,
    pub(crate) cycle_checks: StripedCounter,
    pub(crate) cycle_rejections: StripedCounter,
    pub(crate) false_positives: StripedCounter,
}

impl Stats {
    pub(crate) fn new() -> Self {
        Stats {
            validation_retries: StripedCounter::new(),
            budget_overruns: StripedCounter::new(),
            cycle_checks: StripedCounter::new(),
            cycle_rejections: StripedCounter::new(),
            false_positives: StripedCounter::new(),
        }
    }

    pub(crate) fn snapshot(&self) -> Diagnostics {
        Diagnostics {
            validation_retries: self.validation_retries.sum(),
            budget_overruns: self.budget_overruns.sum(),
            cycle_checks: self.cycle_checks.sum(),
            cycle_rejections: self.cycle_rejections.sum(),
            false_positives: self.false_positives.sum(),
        }
    }
}
