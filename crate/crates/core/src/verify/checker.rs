//! Brute-force linearizability checking against the sequential model.
//!
//! Depth-first search over orders that respect real-time precedence, in the
//! style of Wing and Gong, with failed `(linearized set, model state)` pairs
//! memoized so equivalent prefixes are explored once.

use std::collections::HashSet;

use crate::baselines::GraphModel;
use crate::ops::{Flavor, Op};

use super::history::{EventKind, History};

/// How strictly a `false` from an acyclic edge insertion is judged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AcyclicRule {
    /// `false` only if an endpoint is missing or the edge would close a
    /// cycle at its linearization point.
    #[default]
    Exact,
    /// Additionally accept `false` for an absent edge between live vertices:
    /// a concurrent insertion made the check see a cycle that was then rolled
    /// back. Such a call leaves the graph unchanged.
    AllowFalsePositives,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub rule: AcyclicRule,
    /// Search nodes to expand before giving up with [`Verdict::Inconclusive`].
    pub budget: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            rule: AcyclicRule::Exact,
            budget: 2_000_000,
        }
    }
}

/// One step of a witness order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Linearized {
    pub thread: u32,
    pub op: Op,
    pub ret: bool,
    /// Whether the call was pending in the history and completed here.
    pub completed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// A legal sequential order exists; pending calls the order leaves out
    /// were discarded.
    Linearizable(Vec<Linearized>),
    NotLinearizable,
    /// The search budget ran out, or the history is too long to check.
    Inconclusive { explored: u64 },
}

impl Verdict {
    pub fn is_linearizable(&self) -> bool {
        matches!(self, Verdict::Linearizable(_))
    }

    pub fn witness(&self) -> Option<&[Linearized]> {
        match self {
            Verdict::Linearizable(w) => Some(w),
            _ => None,
        }
    }
}

/// Most calls a history may contain.
pub const MAX_CALLS: usize = 128;

#[derive(Clone, Copy, Debug)]
struct Call {
    thread: u32,
    op: Op,
    inv: u64,
    /// `None` while pending.
    resp: Option<(u64, bool)>,
}

fn calls(h: &History) -> Vec<Call> {
    let mut out: Vec<Call> = Vec::new();
    let mut open: std::collections::HashMap<u32, usize> = Default::default();
    for e in &h.events {
        match e.kind {
            EventKind::Inv => {
                open.insert(e.thread, out.len());
                out.push(Call {
                    thread: e.thread,
                    op: e.op,
                    inv: e.ts,
                    resp: None,
                });
            }
            EventKind::Resp => {
                if let Some(i) = open.remove(&e.thread) {
                    out[i].resp = Some((e.ts, e.ret.unwrap_or(false)));
                }
            }
        }
    }
    out
}

/// Returns from `op` that the sequential model allows in `model`; applies the
/// effect of the chosen return when `ret` is among them.
fn step(model: &mut GraphModel, flavor: Flavor, rule: AcyclicRule, op: Op, ret: bool) -> bool {
    if let (Flavor::Acyclic, AcyclicRule::AllowFalsePositives, Op::AddEdge(a, b), false) = (flavor, rule, op, ret) {
        let live = model.contains_vertex(a) && model.contains_vertex(b);
        if !live || !model.contains_edge(a, b) {
            // either the exact answer or a tolerated false positive
            return true;
        }
        return false;
    }
    let mut next = model.clone();
    if next.apply(flavor, op) == ret {
        *model = next;
        true
    } else {
        false
    }
}

/// Legal return values a pending call could still produce.
fn possible_returns(op: Op) -> &'static [bool] {
    match op {
        Op::AddVertex(_) => &[true],
        _ => &[true, false],
    }
}

/// Every way to complete `h`: each pending invocation is either dropped or
/// answered (at the end of the history) with each return value its operation
/// can produce. With no pending calls the result is `[h]`.
pub fn complete_history(h: &History) -> Vec<History> {
    let pending = h.pending();
    let mut out = vec![h.clone()];
    for &idx in &pending {
        let inv = h.events[idx];
        let mut next = Vec::new();
        for cand in out {
            let mut dropped = cand.clone();
            if let Some(pos) = dropped
                .events
                .iter()
                .position(|e| e.ts == inv.ts && e.thread == inv.thread && e.kind == EventKind::Inv)
            {
                dropped.events.remove(pos);
            }
            next.push(dropped);
            for &ret in possible_returns(inv.op) {
                let mut answered = cand.clone();
                answered.push(inv.thread, inv.op, Some(ret));
                next.push(answered);
            }
        }
        out = next;
    }
    out
}

struct Search<'a> {
    calls: &'a [Call],
    flavor: Flavor,
    opts: CheckOptions,
    explored: u64,
    failed: HashSet<(u128, GraphModel)>,
    order: Vec<Linearized>,
    complete_mask: u128,
}

enum Outcome {
    Found,
    Dead,
    OutOfBudget,
}

impl Search<'_> {
    fn run(&mut self, done: u128, model: &GraphModel) -> Outcome {
        if done & self.complete_mask == self.complete_mask {
            return Outcome::Found;
        }
        if self.failed.contains(&(done, model.clone())) {
            return Outcome::Dead;
        }
        self.explored += 1;
        if self.explored > self.opts.budget {
            return Outcome::OutOfBudget;
        }
        // Earliest response among calls not yet linearized: anything invoked
        // after it cannot go next.
        let horizon = self
            .calls
            .iter()
            .enumerate()
            .filter(|(i, _)| done & (1 << i) == 0)
            .filter_map(|(_, c)| c.resp.map(|(t, _)| t))
            .min()
            .unwrap_or(u64::MAX);
        for (i, c) in self.calls.iter().enumerate() {
            if done & (1 << i) != 0 || c.inv > horizon {
                continue;
            }
            let rets: &[bool] = match c.resp {
                Some((_, r)) => if r { &[true] } else { &[false] },
                None => possible_returns(c.op),
            };
            for &ret in rets {
                let mut next = model.clone();
                if !step(&mut next, self.flavor, self.opts.rule, c.op, ret) {
                    continue;
                }
                self.order.push(Linearized {
                    thread: c.thread,
                    op: c.op,
                    ret,
                    completed: c.resp.is_none(),
                });
                match self.run(done | (1 << i), &next) {
                    Outcome::Found => return Outcome::Found,
                    Outcome::OutOfBudget => return Outcome::OutOfBudget,
                    Outcome::Dead => {
                        self.order.pop();
                    }
                }
            }
        }
        self.failed.insert((done, model.clone()));
        Outcome::Dead
    }
}

/// Searches for a sequential order of the calls in `h` that respects
/// real-time precedence and replays legally on [`GraphModel`] from the empty
/// graph. Pending calls may be left out or completed with any return.
pub fn check_linearizable(h: &History, opts: CheckOptions) -> Verdict {
    let calls = calls(h);
    if calls.len() > MAX_CALLS {
        return Verdict::Inconclusive { explored: 0 };
    }
    let complete_mask = calls
        .iter()
        .enumerate()
        .filter(|(_, c)| c.resp.is_some())
        .fold(0u128, |m, (i, _)| m | (1 << i));
    let mut search = Search {
        calls: &calls,
        flavor: h.flavor,
        opts,
        explored: 0,
        failed: HashSet::new(),
        order: Vec::new(),
        complete_mask,
    };
    match search.run(0, &GraphModel::new()) {
        Outcome::Found => Verdict::Linearizable(search.order),
        Outcome::Dead => Verdict::NotLinearizable,
        Outcome::OutOfBudget => Verdict::Inconclusive {
            explored: search.explored,
        },
    }
}

/// Whether `order` is a legal linearization of every completed call in `h`.
///
/// `order` names threads: the k-th occurrence of thread `t` stands for `t`'s
/// k-th call. The order must respect real-time precedence and replay on the
/// model with the recorded return values.
pub fn is_legal_order(h: &History, order: &[u32], rule: AcyclicRule) -> bool {
    let all = calls(h);
    let mut next_of: std::collections::HashMap<u32, usize> = Default::default();
    let mut seq: Vec<usize> = Vec::with_capacity(order.len());
    for &t in order {
        let skip = next_of.entry(t).or_insert(0);
        let Some(i) = all
            .iter()
            .enumerate()
            .filter(|(_, c)| c.thread == t)
            .map(|(i, _)| i)
            .nth(*skip)
        else {
            return false;
        };
        *skip += 1;
        seq.push(i);
    }
    let covered: HashSet<usize> = seq.iter().copied().collect();
    if covered.len() != seq.len() || all.iter().enumerate().any(|(i, c)| c.resp.is_some() && !covered.contains(&i)) {
        return false;
    }
    for (x, &i) in seq.iter().enumerate() {
        for &j in &seq[x + 1..] {
            if all[j].resp.is_some_and(|(t, _)| t < all[i].inv) {
                return false;
            }
        }
    }
    let mut model = GraphModel::new();
    seq.iter().all(|&i| {
        let c = all[i];
        match c.resp {
            Some((_, ret)) => step(&mut model, h.flavor, rule, c.op, ret),
            None => {
                model.apply(h.flavor, c.op);
                true
            }
        }
    })
}
