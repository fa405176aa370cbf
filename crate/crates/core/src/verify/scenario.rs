//! Deterministic interleavings driven through the internal pause points.
//!
//! A [`ScriptedSchedule`] is a setup prefix followed by directives: start a
//! call and park it at a [`HookPoint`], run a call to completion, or resume a
//! parked call. Every call is recorded, so the outcome can be handed to the
//! linearizability checker.

use std::collections::HashMap;
use std::thread;
use std::time::Duration;

use thiserror::Error;

use super::checker::{check_linearizable, is_legal_order, AcyclicRule, CheckOptions, Verdict};
use super::history::{History, Recorder};
use crate::acyclic::AcyclicGraph;
use crate::diag::Diagnostics;
use crate::graph::{ConcGraph, GraphConfig};
use crate::hooks::{arm, disarm_all, Breakpoint, HookPoint};
use crate::key::Key;
use crate::node::EdgeStatus;
use crate::ops::{Flavor, GraphOps, Op, Snapshot};

/// Thread id under which setup calls are recorded.
pub const SETUP_THREAD: u32 = 0;

/// How long a directive may wait for a thread to park or finish.
const PATIENCE: Duration = Duration::from_secs(5);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Directive {
    /// Start `op` on a new thread and wait until it parks at the
    /// `skip + 1`-th hit of `at`.
    Park { thread: u32, op: Op, at: HookPoint, skip: usize },
    /// Run `op` to completion on a new thread.
    Run { thread: u32, op: Op },
    /// Release a parked thread and wait for its call to return.
    Resume { thread: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptedSchedule {
    pub flavor: Flavor,
    pub config: GraphConfig,
    /// Run in order by [`SETUP_THREAD`] before any directive.
    pub setup: Vec<Op>,
    pub directives: Vec<Directive>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("thread {0} never reached its pause point")]
    NeverParked(u32),
    #[error("thread {0} did not finish in time")]
    Stuck(u32),
    #[error("thread {0} is not parked")]
    NotParked(u32),
    #[error("thread {0} panicked")]
    Panicked(u32),
    #[error("history recorder overflowed")]
    Overflow,
}

/// What a schedule produced.
#[derive(Clone, Debug)]
pub struct ScheduleOutcome {
    pub history: History,
    /// Return value of each directive thread's call.
    pub returns: HashMap<u32, bool>,
    pub diagnostics: Diagnostics,
    /// State after every call returned.
    pub snapshot: Snapshot,
    /// Linked edge nodes still provisional afterwards; empty when all
    /// insertions resolved.
    pub unresolved: Vec<(Key, Key)>,
}

trait ScheduleTarget: GraphOps + Sync {
    fn diagnostics(&self) -> Diagnostics;
    fn unresolved(&self) -> Vec<(Key, Key)>;
}

impl ScheduleTarget for ConcGraph {
    fn diagnostics(&self) -> Diagnostics {
        ConcGraph::diagnostics(self)
    }
    fn unresolved(&self) -> Vec<(Key, Key)> {
        Vec::new()
    }
}

impl ScheduleTarget for AcyclicGraph {
    fn diagnostics(&self) -> Diagnostics {
        AcyclicGraph::diagnostics(self)
    }
    fn unresolved(&self) -> Vec<(Key, Key)> {
        self.edge_statuses()
            .into_iter()
            .filter(|&(_, _, st)| st == EdgeStatus::Transit)
            .map(|(a, b, _)| (a, b))
            .collect()
    }
}

impl ScriptedSchedule {
    pub fn run(&self) -> Result<ScheduleOutcome, ScheduleError> {
        match self.flavor {
            Flavor::Plain => self.run_on(&ConcGraph::with_config(self.config)),
            Flavor::Acyclic => self.run_on(&AcyclicGraph::with_config(self.config)),
        }
    }

    fn run_on<G: ScheduleTarget>(&self, graph: &G) -> Result<ScheduleOutcome, ScheduleError> {
        let recorder = Recorder::new(self.flavor, 4096);
        {
            let mut setup = recorder.thread(SETUP_THREAD);
            for &op in &self.setup {
                setup.call(graph, op);
            }
        }
        let mut returns = HashMap::new();
        let result = thread::scope(|s| {
            let mut parked: HashMap<u32, (Breakpoint, thread::ScopedJoinHandle<'_, bool>)> = HashMap::new();
            let outcome = (|| {
                for d in &self.directives {
                    match *d {
                        Directive::Park { thread, op, at, skip } => {
                            let gate = Breakpoint::new();
                            let handle = {
                                let (gate, recorder) = (gate.clone(), &recorder);
                                s.spawn(move || {
                                    arm(at, skip, &gate);
                                    let ret = recorder.thread(thread).call(graph, op);
                                    disarm_all();
                                    ret
                                })
                            };
                            let deadline = std::time::Instant::now() + PATIENCE;
                            let mut reached = false;
                            while !reached && !handle.is_finished() && std::time::Instant::now() < deadline {
                                reached = gate.wait_reached(Duration::from_millis(5));
                            }
                            parked.insert(thread, (gate, handle));
                            if !reached {
                                return Err(ScheduleError::NeverParked(thread));
                            }
                        }
                        Directive::Run { thread, op } => {
                            let recorder = &recorder;
                            let handle = s.spawn(move || recorder.thread(thread).call(graph, op));
                            returns.insert(thread, join(thread, handle)?);
                        }
                        Directive::Resume { thread } => {
                            let (gate, handle) = parked.remove(&thread).ok_or(ScheduleError::NotParked(thread))?;
                            gate.release();
                            returns.insert(thread, join(thread, handle)?);
                        }
                    }
                }
                Ok(())
            })();
            // Never leave a thread parked behind, whatever happened.
            for (_, (gate, _)) in parked.drain() {
                gate.release();
            }
            outcome
        });
        result?;
        let history = recorder.finish().map_err(|_| ScheduleError::Overflow)?;
        Ok(ScheduleOutcome {
            history,
            returns,
            diagnostics: graph.diagnostics(),
            snapshot: graph.snapshot(),
            unresolved: graph.unresolved(),
        })
    }
}

fn join(thread: u32, handle: thread::ScopedJoinHandle<'_, bool>) -> Result<bool, ScheduleError> {
    let deadline = std::time::Instant::now() + PATIENCE;
    while !handle.is_finished() {
        if std::time::Instant::now() > deadline {
            return Err(ScheduleError::Stuck(thread));
        }
        thread::sleep(Duration::from_millis(1));
    }
    handle.join().map_err(|_| ScheduleError::Panicked(thread))
}

/// A named schedule together with what a correct implementation must do.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: &'static str,
    pub schedule: ScriptedSchedule,
    /// Expected return per directive thread.
    pub expect: Vec<(u32, bool)>,
    /// A legal linearization of the directive threads' calls; the setup
    /// calls are implicitly first.
    pub order: Vec<u32>,
    pub rule: AcyclicRule,
    /// Expected false-positive count, for acyclic schedules.
    pub false_positives: Option<u64>,
}

/// Result of running one [`Scenario`].
#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub name: &'static str,
    pub outcome: Result<ScheduleOutcome, ScheduleError>,
    pub returns_match: bool,
    pub verdict: Option<Verdict>,
    /// The scenario's stated order replays legally on the recorded history.
    pub order_legal: bool,
    pub clean: bool,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
            && self.returns_match
            && self.verdict.as_ref().is_some_and(Verdict::is_linearizable)
            && self.order_legal
            && self.clean
    }
}

impl Scenario {
    pub fn run(&self) -> ScenarioReport {
        let outcome = self.schedule.run();
        let (mut returns_match, mut verdict, mut order_legal, mut clean) = (false, None, false, false);
        if let Ok(o) = &outcome {
            returns_match = self.expect.iter().all(|(t, r)| o.returns.get(t) == Some(r));
            verdict = Some(check_linearizable(
                &o.history,
                CheckOptions {
                    rule: self.rule,
                    ..CheckOptions::default()
                },
            ));
            let mut order = vec![SETUP_THREAD; self.schedule.setup.len()];
            order.extend(&self.order);
            order_legal = is_legal_order(&o.history, &order, self.rule);
            clean = o.unresolved.is_empty()
                && self
                    .false_positives
                    .is_none_or(|fp| o.diagnostics.false_positives == fp);
        }
        ScenarioReport {
            name: self.name,
            outcome,
            returns_match,
            verdict,
            order_legal,
            clean,
        }
    }
}

fn k(v: i64) -> Key {
    Key::new(v).expect("small keys")
}

fn plain(die: bool, setup: Vec<Op>, directives: Vec<Directive>) -> ScriptedSchedule {
    ScriptedSchedule {
        flavor: Flavor::Plain,
        config: GraphConfig::default().with_die(die),
        setup,
        directives,
    }
}

fn vertices(keys: &[i64]) -> Vec<Op> {
    keys.iter().map(|&v| Op::AddVertex(k(v))).collect()
}

fn with_edges(keys: &[i64], edges: &[(i64, i64)]) -> Vec<Op> {
    let mut ops = vertices(keys);
    ops.extend(edges.iter().map(|&(a, b)| Op::AddEdge(k(a), k(b))));
    ops
}

/// The races every implementation of the concurrent graph must get right.
pub fn scenarios() -> Vec<Scenario> {
    use Directive::{Park, Resume, Run};
    use HookPoint::*;
    let exact = AcyclicRule::Exact;
    vec![
        // An edge insertion finds its first endpoint, which is then removed
        // while the second endpoint is inserted. Only the second liveness
        // check stops it from inserting an edge to a dead vertex.
        Scenario {
            name: "add_edge rechecks endpoints removed after the search",
            schedule: plain(
                false,
                vertices(&[5]),
                vec![
                    Park { thread: 1, op: Op::AddEdge(k(5), k(7)), at: SearchFirstEndpointFound, skip: 0 },
                    Run { thread: 3, op: Op::AddVertex(k(7)) },
                    Run { thread: 2, op: Op::RemoveVertex(k(5)) },
                    Resume { thread: 1 },
                ],
            ),
            expect: vec![(1, false), (2, true), (3, true)],
            order: vec![1, 3, 2],
            rule: exact,
            false_positives: None,
        },
        // A lookup walks past where 7 belongs just before 7 is inserted.
        Scenario {
            name: "contains_vertex misses a vertex inserted behind it",
            schedule: plain(
                false,
                vertices(&[5, 9]),
                vec![
                    Park { thread: 1, op: Op::ContainsVertex(k(7)), at: ContainsVertexLocated, skip: 0 },
                    Run { thread: 2, op: Op::AddVertex(k(7)) },
                    Resume { thread: 1 },
                ],
            ),
            expect: vec![(1, false), (2, true)],
            order: vec![1, 2],
            rule: exact,
            false_positives: None,
        },
        // An edge insertion has validated both endpoints when the
        // destination is removed (with incoming-edge cleanup); the insertion
        // still succeeds and linearizes first.
        Scenario {
            name: "add_edge overlapping remove_vertex of its destination",
            schedule: plain(
                true,
                vertices(&[5, 7]),
                vec![
                    Park { thread: 2, op: Op::AddEdge(k(5), k(7)), at: EndpointsRechecked, skip: 0 },
                    Run { thread: 1, op: Op::RemoveVertex(k(7)) },
                    Resume { thread: 2 },
                ],
            ),
            expect: vec![(1, true), (2, true)],
            order: vec![2, 1],
            rule: exact,
            false_positives: None,
        },
        // Two edge calls read the node after 5 (which is 9) just before 7 is
        // inserted between them; both fail and linearize before the insert.
        Scenario {
            name: "edge calls miss a destination inserted during their search",
            schedule: plain(
                false,
                vertices(&[5, 9]),
                vec![
                    Park { thread: 2, op: Op::AddEdge(k(5), k(7)), at: SearchSecondEndpointStep, skip: 0 },
                    Park { thread: 3, op: Op::RemoveEdge(k(5), k(7)), at: SearchSecondEndpointStep, skip: 0 },
                    Run { thread: 1, op: Op::AddVertex(k(7)) },
                    Resume { thread: 2 },
                    Resume { thread: 3 },
                ],
            ),
            expect: vec![(1, true), (2, false), (3, false)],
            order: vec![2, 3, 1],
            rule: exact,
            false_positives: None,
        },
        // The destination is removed (and its incoming edge cleaned up)
        // while an edge removal is between validation and locking.
        Scenario {
            name: "remove_edge overlapping remove_vertex of its destination",
            schedule: plain(
                true,
                with_edges(&[5, 9], &[(5, 9)]),
                vec![
                    Park { thread: 2, op: Op::RemoveEdge(k(5), k(9)), at: EndpointsRechecked, skip: 0 },
                    Run { thread: 1, op: Op::RemoveVertex(k(9)) },
                    Resume { thread: 2 },
                ],
            ),
            expect: vec![(1, true), (2, true)],
            order: vec![2, 1],
            rule: exact,
            false_positives: None,
        },
        // A lookup has found both endpoints when the destination is removed;
        // it still reports the edge and linearizes before the removal.
        Scenario {
            name: "contains_edge overlapping remove_vertex of its destination",
            schedule: plain(
                false,
                with_edges(&[5, 9], &[(5, 9)]),
                vec![
                    Park { thread: 2, op: Op::ContainsEdge(k(5), k(9)), at: ContainsEdgeEndpointsFound, skip: 0 },
                    Run { thread: 1, op: Op::RemoveVertex(k(9)) },
                    Resume { thread: 2 },
                ],
            ),
            expect: vec![(1, true), (2, true)],
            order: vec![2, 1],
            rule: exact,
            false_positives: None,
        },
        // A lookup stands on edge node 9 while it is removed and a fresh node
        // for the same edge is inserted; the lookup reads the stale mark.
        Scenario {
            name: "contains_edge on a node removed and reinserted under it",
            schedule: plain(
                false,
                with_edges(&[5, 9], &[(5, 9)]),
                vec![
                    Park { thread: 1, op: Op::ContainsEdge(k(5), k(9)), at: ContainsEdgeLocated, skip: 0 },
                    Run { thread: 3, op: Op::RemoveEdge(k(5), k(9)) },
                    Run { thread: 2, op: Op::AddEdge(k(5), k(9)) },
                    Resume { thread: 1 },
                ],
            ),
            expect: vec![(1, false), (2, true), (3, true)],
            order: vec![3, 1, 2],
            rule: exact,
            false_positives: None,
        },
        // Three edge calls on (5, 7) overlap the removal of 7 and all succeed.
        Scenario {
            name: "three edge calls overlapping remove_vertex",
            schedule: plain(
                false,
                vertices(&[5, 7]),
                vec![
                    Park { thread: 2, op: Op::AddEdge(k(5), k(7)), at: EndpointsRechecked, skip: 0 },
                    Park { thread: 3, op: Op::RemoveEdge(k(5), k(7)), at: EndpointsRechecked, skip: 0 },
                    Park { thread: 4, op: Op::ContainsEdge(k(5), k(7)), at: ContainsEdgeEndpointsFound, skip: 0 },
                    Run { thread: 1, op: Op::RemoveVertex(k(7)) },
                    Resume { thread: 2 },
                    Resume { thread: 4 },
                    Resume { thread: 3 },
                ],
            ),
            expect: vec![(1, true), (2, true), (3, true), (4, true)],
            order: vec![2, 4, 3, 1],
            rule: exact,
            false_positives: None,
        },
        // With 7 -> 5 -> {3, 4}, inserting 3 -> 7 and 4 -> 7 both close real
        // cycles. The first is parked with its provisional edge linked while
        // the second runs its check; both are rejected.
        Scenario {
            name: "concurrent acyclic inserts that each close a cycle",
            schedule: ScriptedSchedule {
                flavor: Flavor::Acyclic,
                config: GraphConfig::default(),
                setup: with_edges(&[3, 4, 5, 7], &[(7, 5), (5, 3), (5, 4)]),
                directives: vec![
                    Park { thread: 1, op: Op::AddEdge(k(3), k(7)), at: TransitLinked, skip: 0 },
                    Run { thread: 2, op: Op::AddEdge(k(4), k(7)) },
                    Resume { thread: 1 },
                ],
            },
            expect: vec![(1, false), (2, false)],
            order: vec![1, 2],
            rule: exact,
            false_positives: Some(0),
        },
        // A self-loop is always a cycle, even when its vertex disappears
        // while the check runs.
        Scenario {
            name: "acyclic self-loop insert overlapping removal of its vertex",
            schedule: ScriptedSchedule {
                flavor: Flavor::Acyclic,
                config: GraphConfig::default(),
                setup: vertices(&[8]),
                directives: vec![
                    Park { thread: 1, op: Op::AddEdge(k(8), k(8)), at: TransitLinked, skip: 0 },
                    Run { thread: 2, op: Op::RemoveVertex(k(8)) },
                    Resume { thread: 1 },
                ],
            },
            expect: vec![(1, false), (2, true)],
            order: vec![1, 2],
            rule: exact,
            false_positives: Some(0),
        },
        // 5 -> 3 exists, so 3 -> 5 closes a cycle. Removing 3 with cleanup
        // deletes 5 -> 3 before the check walks it; the insert must not
        // succeed on the strength of that empty walk.
        Scenario {
            name: "acyclic insert whose back path is cleaned up mid-check",
            schedule: ScriptedSchedule {
                flavor: Flavor::Acyclic,
                config: GraphConfig::default().with_die(true),
                setup: with_edges(&[3, 5], &[(5, 3)]),
                directives: vec![
                    Park { thread: 1, op: Op::AddEdge(k(3), k(5)), at: TransitLinked, skip: 0 },
                    Run { thread: 2, op: Op::RemoveVertex(k(3)) },
                    Resume { thread: 1 },
                ],
            },
            expect: vec![(1, false), (2, true)],
            order: vec![2, 1],
            rule: exact,
            false_positives: Some(0),
        },
        // With 1 -> 2, inserting 2 -> 3 and 3 -> 1 closes a cycle only
        // together. Each check sees the other's provisional edge, so both are
        // rejected: a false positive on each side.
        Scenario {
            name: "concurrent acyclic inserts rejected by each other's provisional edge",
            schedule: ScriptedSchedule {
                flavor: Flavor::Acyclic,
                config: GraphConfig::default(),
                setup: with_edges(&[1, 2, 3], &[(1, 2)]),
                directives: vec![
                    Park { thread: 1, op: Op::AddEdge(k(2), k(3)), at: TransitLinked, skip: 0 },
                    Park { thread: 2, op: Op::AddEdge(k(3), k(1)), at: CycleChecked, skip: 0 },
                    Resume { thread: 1 },
                    Resume { thread: 2 },
                ],
            },
            expect: vec![(1, false), (2, false)],
            order: vec![1, 2],
            rule: AcyclicRule::AllowFalsePositives,
            false_positives: Some(2),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_scenario_passes() {
        for s in scenarios() {
            let r = s.run();
            assert!(r.passed(), "{}: {:?}", s.name, r);
        }
    }

    #[test]
    fn resuming_an_unparked_thread_is_an_error() {
        let s = plain(false, vec![], vec![Directive::Resume { thread: 1 }]);
        assert_eq!(s.run().unwrap_err(), ScheduleError::NotParked(1));
    }

    #[test]
    fn unreachable_pause_point_is_reported() {
        // contains_vertex never hits an edge pause point
        let s = plain(
            false,
            vec![],
            vec![Directive::Park {
                thread: 1,
                op: Op::ContainsVertex(k(1)),
                at: HookPoint::EdgeWindowLocked,
                skip: 0,
            }],
        );
        assert_eq!(s.run().unwrap_err(), ScheduleError::NeverParked(1));
    }

    #[test]
    fn double_false_positive_is_not_exactly_linearizable() {
        let s = scenarios().pop().unwrap();
        let o = s.schedule.run().unwrap();
        assert_eq!(check_linearizable(&o.history, CheckOptions::default()), Verdict::NotLinearizable);
    }
}
