//! Correctness harness: history recording, linearizability checking, and
//! acyclicity auditing. With the `test-hooks` feature it also provides
//! scripted interleavings of known races.

mod audit;
mod checker;
mod history;
#[cfg(feature = "test-hooks")]
mod scenario;

pub use audit::{audit_acyclicity, audit_snapshot, record, HistoryWorkload};
pub use checker::{
    check_linearizable, complete_history, is_legal_order, AcyclicRule, CheckOptions, Linearized, Verdict, MAX_CALLS,
};
pub use history::{EventKind, History, HistoryError, HistoryEvent, Recorder, RecorderOverflow, ThreadRecorder};
#[cfg(feature = "test-hooks")]
pub use scenario::{
    scenarios, Directive, Scenario, ScenarioReport, ScheduleError, ScheduleOutcome, ScriptedSchedule, SETUP_THREAD,
};
