//! Concurrent histories: recording, well-formedness, and the line format.
//!
//! One event per line, fields separated by single spaces:
//!
//! ```text
//! ts thread op args kind ret
//! 3 1 add_edge 5,7 inv -
//! 8 1 add_edge 5,7 resp true
//! ```
//!
//! `ret` is `-` on invocations. Lines starting with `#` are comments, except
//! `# flavor plain|acyclic`, which fixes the flavor of a history that has no
//! edge operations to tell it by.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use parking_lot::Mutex;
use thiserror::Error;

use crate::key::Key;
use crate::ops::{Flavor, GraphOps, Op};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Inv,
    Resp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HistoryEvent {
    pub ts: u64,
    pub thread: u32,
    pub op: Op,
    pub kind: EventKind,
    /// `Some` exactly on responses.
    pub ret: Option<bool>,
}

impl HistoryEvent {
    pub fn inv(ts: u64, thread: u32, op: Op) -> Self {
        HistoryEvent {
            ts,
            thread,
            op,
            kind: EventKind::Inv,
            ret: None,
        }
    }

    pub fn resp(ts: u64, thread: u32, op: Op, ret: bool) -> Self {
        HistoryEvent {
            ts,
            thread,
            op,
            kind: EventKind::Resp,
            ret: Some(ret),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HistoryError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("event {index}: timestamp goes backwards")]
    Unordered { index: usize },
    #[error("event {index}: thread {thread} {msg}")]
    IllFormed { index: usize, thread: u32, msg: &'static str },
    #[error("history mixes plain and acyclic edge operations")]
    MixedFlavor,
}

/// A sequence of events ordered by timestamp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct History {
    pub flavor: Flavor,
    pub events: Vec<HistoryEvent>,
}

impl History {
    pub fn new(flavor: Flavor) -> Self {
        History {
            flavor,
            events: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Appends an event stamped one past the last one.
    pub fn push(&mut self, thread: u32, op: Op, ret: Option<bool>) -> &mut Self {
        let ts = self.events.last().map_or(0, |e| e.ts + 1);
        self.events.push(match ret {
            None => HistoryEvent::inv(ts, thread, op),
            Some(r) => HistoryEvent::resp(ts, thread, op, r),
        });
        self
    }

    /// Invocation immediately followed by its response.
    pub fn call(&mut self, thread: u32, op: Op, ret: bool) -> &mut Self {
        self.push(thread, op, None).push(thread, op, Some(ret))
    }

    /// Timestamps nondecreasing; per thread, invocations and matching
    /// responses alternate, starting with an invocation.
    pub fn check_well_formed(&self) -> Result<(), HistoryError> {
        let mut open: HashMap<u32, Op> = HashMap::new();
        for (index, w) in self.events.windows(2).enumerate() {
            if w[1].ts < w[0].ts {
                return Err(HistoryError::Unordered { index: index + 1 });
            }
        }
        for (index, e) in self.events.iter().enumerate() {
            let ill = |msg| HistoryError::IllFormed {
                index,
                thread: e.thread,
                msg,
            };
            match e.kind {
                EventKind::Inv => {
                    if e.ret.is_some() {
                        return Err(ill("has an invocation carrying a return value"));
                    }
                    if open.insert(e.thread, e.op).is_some() {
                        return Err(ill("invokes while another call is pending"));
                    }
                }
                EventKind::Resp => {
                    if e.ret.is_none() {
                        return Err(ill("has a response without a return value"));
                    }
                    match open.remove(&e.thread) {
                        Some(op) if op == e.op => {}
                        Some(_) => return Err(ill("responds to a different operation")),
                        None => return Err(ill("responds without an invocation")),
                    }
                }
            }
        }
        Ok(())
    }

    /// Indices of invocations that have no response.
    pub fn pending(&self) -> Vec<usize> {
        let mut open: HashMap<u32, usize> = HashMap::new();
        for (i, e) in self.events.iter().enumerate() {
            match e.kind {
                EventKind::Inv => {
                    open.insert(e.thread, i);
                }
                EventKind::Resp => {
                    open.remove(&e.thread);
                }
            }
        }
        let mut v: Vec<usize> = open.into_values().collect();
        v.sort_unstable();
        v
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn op_name(flavor: Flavor, op: &Op) -> &'static str {
    match (flavor, op) {
        (_, Op::AddVertex(_)) => "add_vertex",
        (_, Op::RemoveVertex(_)) => "remove_vertex",
        (_, Op::ContainsVertex(_)) => "contains_vertex",
        (Flavor::Plain, Op::AddEdge(..)) => "add_edge",
        (Flavor::Plain, Op::RemoveEdge(..)) => "remove_edge",
        (Flavor::Plain, Op::ContainsEdge(..)) => "contains_edge",
        (Flavor::Acyclic, Op::AddEdge(..)) => "acyclic_add_edge",
        (Flavor::Acyclic, Op::RemoveEdge(..)) => "acyclic_remove_edge",
        (Flavor::Acyclic, Op::ContainsEdge(..)) => "acyclic_contains_edge",
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flavor = match self.flavor {
            Flavor::Plain => "plain",
            Flavor::Acyclic => "acyclic",
        };
        writeln!(f, "# flavor {flavor}")?;
        for e in &self.events {
            let args = match e.op.keys() {
                (a, None) => a.to_string(),
                (a, Some(b)) => format!("{a},{b}"),
            };
            let (kind, ret) = match (e.kind, e.ret) {
                (EventKind::Inv, _) => ("inv", "-"),
                (EventKind::Resp, Some(true)) => ("resp", "true"),
                (EventKind::Resp, _) => ("resp", "false"),
            };
            writeln!(f, "{} {} {} {args} {kind} {ret}", e.ts, e.thread, op_name(self.flavor, &e.op))?;
        }
        Ok(())
    }
}

impl FromStr for History {
    type Err = HistoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut declared: Option<Flavor> = None;
        let mut inferred: Option<Flavor> = None;
        let mut events = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| HistoryError::Parse { line, msg };
            let text = raw.trim();
            if text.is_empty() {
                continue;
            }
            if let Some(comment) = text.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                if words.next() == Some("flavor") {
                    declared = Some(match words.next() {
                        Some("plain") => Flavor::Plain,
                        Some("acyclic") => Flavor::Acyclic,
                        other => return Err(err(format!("unknown flavor {other:?}"))),
                    });
                }
                continue;
            }
            let fields: Vec<&str> = text.split_whitespace().collect();
            let [ts, thread, name, args, kind, ret] = fields[..] else {
                return Err(err(format!("expected 6 fields, found {}", fields.len())));
            };
            let ts: u64 = ts.parse().map_err(|_| err(format!("bad timestamp {ts:?}")))?;
            let thread: u32 = thread.parse().map_err(|_| err(format!("bad thread id {thread:?}")))?;
            let keys = args
                .split(',')
                .map(|a| {
                    let v: i64 = a.parse().map_err(|_| err(format!("bad key {a:?}")))?;
                    Key::new(v).map_err(|e| err(e.to_string()))
                })
                .collect::<Result<Vec<Key>, _>>()?;
            let (base, flavor) = match name.strip_prefix("acyclic_") {
                Some(rest) => (rest, Some(Flavor::Acyclic)),
                None if name.ends_with("_edge") => (name, Some(Flavor::Plain)),
                None => (name, None),
            };
            if let Some(fl) = flavor {
                if inferred.is_some_and(|prev| prev != fl) {
                    return Err(HistoryError::MixedFlavor);
                }
                inferred = Some(fl);
            }
            let op = match (base, &keys[..]) {
                ("add_vertex", &[k]) => Op::AddVertex(k),
                ("remove_vertex", &[k]) => Op::RemoveVertex(k),
                ("contains_vertex", &[k]) => Op::ContainsVertex(k),
                ("add_edge", &[a, b]) => Op::AddEdge(a, b),
                ("remove_edge", &[a, b]) => Op::RemoveEdge(a, b),
                ("contains_edge", &[a, b]) => Op::ContainsEdge(a, b),
                _ => return Err(err(format!("unknown operation {name} with {} argument(s)", keys.len()))),
            };
            let event = match (kind, ret) {
                ("inv", "-") => HistoryEvent::inv(ts, thread, op),
                ("resp", "true") => HistoryEvent::resp(ts, thread, op, true),
                ("resp", "false") => HistoryEvent::resp(ts, thread, op, false),
                _ => return Err(err(format!("bad kind/return {kind:?} {ret:?}"))),
            };
            events.push(event);
        }
        let flavor = match (declared, inferred) {
            (Some(d), Some(i)) if d != i => return Err(HistoryError::MixedFlavor),
            (Some(f), _) | (None, Some(f)) => f,
            (None, None) => Flavor::Plain,
        };
        Ok(History { flavor, events })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("recorder overflow: more than {capacity} events on one thread")]
pub struct RecorderOverflow {
    pub capacity: usize,
}

/// Multi-producer history recorder.
///
/// Each worker records into its own [`ThreadRecorder`] buffer; timestamps
/// come from one shared counter, so merging the buffers by timestamp yields
/// an order consistent with real time.
pub struct Recorder {
    flavor: Flavor,
    clock: AtomicU64,
    capacity: usize,
    overflow: AtomicBool,
    buffers: Mutex<Vec<Vec<HistoryEvent>>>,
}

impl Recorder {
    /// `capacity` bounds the events per thread.
    pub fn new(flavor: Flavor, capacity: usize) -> Self {
        Recorder {
            flavor,
            clock: AtomicU64::new(0),
            capacity,
            overflow: AtomicBool::new(false),
            buffers: Mutex::new(Vec::new()),
        }
    }

    pub fn thread(&self, thread: u32) -> ThreadRecorder<'_> {
        ThreadRecorder {
            recorder: self,
            thread,
            events: Vec::with_capacity(self.capacity.min(1024)),
        }
    }

    fn tick(&self) -> u64 {
        self.clock.fetch_add(1, Ordering::SeqCst)
    }

    /// Merges all buffers. Rejects the run if any thread overflowed.
    pub fn finish(self) -> Result<History, RecorderOverflow> {
        if self.overflow.load(Ordering::SeqCst) {
            return Err(RecorderOverflow {
                capacity: self.capacity,
            });
        }
        let mut events: Vec<HistoryEvent> = self.buffers.into_inner().into_iter().flatten().collect();
        events.sort_by_key(|e| e.ts);
        Ok(History {
            flavor: self.flavor,
            events,
        })
    }
}

/// One thread's view of a [`Recorder`]; hands its buffer back on drop.
pub struct ThreadRecorder<'r> {
    recorder: &'r Recorder,
    thread: u32,
    events: Vec<HistoryEvent>,
}

impl ThreadRecorder<'_> {
    /// Runs `op` on `graph`, recording its invocation and response.
    pub fn call<G: GraphOps + ?Sized>(&mut self, graph: &G, op: Op) -> bool {
        let inv = self.recorder.tick();
        let ret = graph.apply(op);
        let resp = self.recorder.tick();
        if self.events.len() + 2 > self.recorder.capacity {
            self.recorder.overflow.store(true, Ordering::SeqCst);
        } else {
            self.events.push(HistoryEvent::inv(inv, self.thread, op));
            self.events.push(HistoryEvent::resp(resp, self.thread, op, ret));
        }
        ret
    }
}

impl Drop for ThreadRecorder<'_> {
    fn drop(&mut self) {
        let events = std::mem::take(&mut self.events);
        self.recorder.buffers.lock().push(events);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::CoarseLockGraph;

    fn k(v: i64) -> Key {
        Key::new(v).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let mut h = History::new(Flavor::Acyclic);
        h.push(0, Op::AddVertex(k(1)), None)
            .push(1, Op::AddEdge(k(1), k(2)), None)
            .push(0, Op::AddVertex(k(1)), Some(true))
            .push(1, Op::AddEdge(k(1), k(2)), Some(false));
        let text = h.to_text();
        assert!(text.contains("1 1 acyclic_add_edge 1,2 inv -"));
        assert!(text.contains("3 1 acyclic_add_edge 1,2 resp false"));
        assert_eq!(text.parse::<History>().unwrap(), h);
    }

    #[test]
    fn flavor_is_inferred_from_names() {
        let h: History = "0 0 add_edge 1,2 inv -\n1 0 add_edge 1,2 resp false\n".parse().unwrap();
        assert_eq!(h.flavor, Flavor::Plain);
        let h: History = "0 0 acyclic_contains_edge 1,2 inv -\n".parse().unwrap();
        assert_eq!(h.flavor, Flavor::Acyclic);
        let h: History = "# flavor acyclic\n0 0 add_vertex 1 inv -\n".parse().unwrap();
        assert_eq!(h.flavor, Flavor::Acyclic);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = "# c\n0 0 add_vertex 1 inv -\n1 0 add_vertex x resp true\n"
            .parse::<History>()
            .unwrap_err();
        assert!(matches!(e, HistoryError::Parse { line: 3, .. }), "{e}");
        assert!("0 0 add_vertex 1 inv\n".parse::<History>().is_err());
        assert!("0 0 add_vertex 1,2 inv -\n".parse::<History>().is_err());
        assert!("0 0 add_vertex 1 resp -\n".parse::<History>().is_err());
        assert_eq!(
            "0 0 add_edge 1,2 inv -\n1 1 acyclic_add_edge 1,2 inv -\n".parse::<History>(),
            Err(HistoryError::MixedFlavor)
        );
    }

    #[test]
    fn well_formedness() {
        let mut h = History::new(Flavor::Plain);
        h.call(0, Op::AddVertex(k(1)), true);
        assert!(h.check_well_formed().is_ok());
        h.push(0, Op::AddVertex(k(2)), None).push(0, Op::AddVertex(k(3)), None);
        assert!(matches!(h.check_well_formed(), Err(HistoryError::IllFormed { index: 3, .. })));

        let mut h = History::new(Flavor::Plain);
        h.push(0, Op::AddVertex(k(1)), Some(true));
        assert!(h.check_well_formed().is_err());

        let mut h = History::new(Flavor::Plain);
        h.call(0, Op::AddVertex(k(1)), true);
        h.events[1].ts = 0;
        h.events[0].ts = 1;
        assert_eq!(h.check_well_formed(), Err(HistoryError::Unordered { index: 1 }));
    }

    #[test]
    fn pending_invocations() {
        let mut h = History::new(Flavor::Plain);
        h.push(0, Op::AddVertex(k(1)), None)
            .push(1, Op::AddVertex(k(2)), None)
            .push(1, Op::AddVertex(k(2)), Some(true));
        assert_eq!(h.pending(), vec![0]);
    }

    #[test]
    fn one_thread_three_ops_gives_six_events() {
        let g = CoarseLockGraph::new(Flavor::Plain);
        let rec = Recorder::new(Flavor::Plain, 64);
        {
            let mut t = rec.thread(0);
            t.call(&g, Op::AddVertex(k(1)));
            t.call(&g, Op::ContainsVertex(k(1)));
            t.call(&g, Op::RemoveVertex(k(1)));
        }
        let h = rec.finish().unwrap();
        assert_eq!(h.len(), 6);
        h.check_well_formed().unwrap();
        let rets: Vec<_> = h.events.iter().filter_map(|e| e.ret).collect();
        assert_eq!(rets, vec![true, true, true]);
    }

    #[test]
    fn threads_merge_by_timestamp() {
        let g = CoarseLockGraph::new(Flavor::Plain);
        let rec = Recorder::new(Flavor::Plain, 64);
        std::thread::scope(|s| {
            for t in 0..2u32 {
                let (rec, g) = (&rec, &g);
                s.spawn(move || {
                    let mut r = rec.thread(t);
                    for i in 0..3 {
                        r.call(g, Op::AddVertex(k(i + 1)));
                    }
                });
            }
        });
        let h = rec.finish().unwrap();
        assert_eq!(h.len(), 12);
        h.check_well_formed().unwrap();
    }

    #[test]
    fn overflow_rejects_the_run() {
        let g = CoarseLockGraph::new(Flavor::Plain);
        let rec = Recorder::new(Flavor::Plain, 4);
        {
            let mut t = rec.thread(0);
            for _ in 0..3 {
                t.call(&g, Op::ContainsVertex(k(1)));
            }
        }
        assert_eq!(rec.finish(), Err(RecorderOverflow { capacity: 4 }));
    }
}
