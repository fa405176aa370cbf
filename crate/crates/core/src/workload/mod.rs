//! Randomized workloads and the throughput harness.
//!
//! A [`WorkloadSpec`] fixes an operation mix, a key range, a graph variant and
//! how long to run. [`run_benchmark`] seeds the initial graph, lets each
//! worker draw operations from its own seeded stream, and aggregates
//! per-thread counters into a [`BenchResult`].

mod keys;
mod report;
mod runner;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

pub use keys::{KeySpace, OpStream, Planned};
pub use report::{emit_csv, parse_csv, write_csv, CsvRow, CSV_HEADER};
pub use runner::{
    build_graph, drain_deferred, drive, run_benchmark, run_on, run_once, seed_initial_graph, AnyGraph, BenchResult, Limits, OpCounts, Probe,
    RunStats,
};

/// Operation kinds in the order mixes are written: add vertex, add edge,
/// remove vertex, remove edge, contains vertex, contains edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    AddVertex,
    AddEdge,
    RemoveVertex,
    RemoveEdge,
    ContainsVertex,
    ContainsEdge,
}

impl OpKind {
    pub const ALL: [OpKind; 6] = [
        OpKind::AddVertex,
        OpKind::AddEdge,
        OpKind::RemoveVertex,
        OpKind::RemoveEdge,
        OpKind::ContainsVertex,
        OpKind::ContainsEdge,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_vertex_update(self) -> bool {
        matches!(self, OpKind::AddVertex | OpKind::RemoveVertex)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("mix percentages sum to {0}, expected 100")]
    MixSum(u32),
    #[error("key range must be at least 1")]
    EmptyKeyRange,
    #[error("at least one thread is required")]
    NoThreads,
    #[error("{threads} threads cannot each own a vertex key in a range of {range}")]
    TooManyThreads { threads: usize, range: u32 },
    #[error("initial graph of {initial} vertices does not fit a key range of {range}")]
    InitialTooLarge { initial: u32, range: u32 },
    #[error("edge density {0} is outside [0, 1]")]
    Density(f64),
    #[error("at least one iteration is required")]
    NoIterations,
    #[error("a run needs a positive duration or an operation limit")]
    Unbounded,
    #[error("unknown {what} {value:?}")]
    Unknown { what: &'static str, value: String },
}

/// Percentages over the six operations, summing to 100.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mix([u8; 6]);

impl Mix {
    /// Arguments follow [`OpKind`] order.
    pub fn new(
        add_vertex: u8,
        add_edge: u8,
        remove_vertex: u8,
        remove_edge: u8,
        contains_vertex: u8,
        contains_edge: u8,
    ) -> Result<Self, SpecError> {
        let m = [add_vertex, add_edge, remove_vertex, remove_edge, contains_vertex, contains_edge];
        let sum: u32 = m.iter().map(|&p| p as u32).sum();
        if sum != 100 {
            return Err(SpecError::MixSum(sum));
        }
        Ok(Mix(m))
    }

    pub fn percent(&self, kind: OpKind) -> u8 {
        self.0[kind.index()]
    }

    pub fn as_array(&self) -> [u8; 6] {
        self.0
    }

    /// Maps a uniform draw in `0..100` to an operation.
    pub fn pick(&self, roll: u8) -> OpKind {
        let mut acc = 0u8;
        for kind in OpKind::ALL {
            acc += self.0[kind.index()];
            if roll < acc {
                return kind;
            }
        }
        unreachable!("mix sums to 100")
    }
}

/// The three stock mixes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// 25/25/10/10/15/15.
    Update,
    /// 7/7/3/3/40/40.
    Contains,
    /// 40% add edge, 60% remove edge.
    Edges,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Update, Preset::Contains, Preset::Edges];

    pub fn mix(self) -> Mix {
        match self {
            Preset::Update => Mix([25, 25, 10, 10, 15, 15]),
            Preset::Contains => Mix([7, 7, 3, 3, 40, 40]),
            Preset::Edges => Mix([0, 40, 0, 60, 0, 0]),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Update => "update",
            Preset::Contains => "contains",
            Preset::Edges => "edges",
        }
    }
}

impl FromStr for Preset {
    type Err = SpecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or(SpecError::Unknown {
            what: "workload",
            value: s.to_string(),
        })
    }
}

/// Which implementation a run exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Concurrent graph; removed vertices leave their incoming edges behind.
    NoDie,
    /// Concurrent graph that deletes incoming edges on vertex removal.
    Die,
    /// One global lock around the sequential graph.
    Coarse,
    /// Unsynchronized sequential graph; always runs one thread.
    Seq,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::NoDie, Variant::Die, Variant::Coarse, Variant::Seq];

    pub fn name(self) -> &'static str {
        match self {
            Variant::NoDie => "nodie",
            Variant::Die => "die",
            Variant::Coarse => "coarse",
            Variant::Seq => "seq",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = SpecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL.into_iter().find(|v| v.name() == s).ok_or(SpecError::Unknown {
            what: "variant",
            value: s.to_string(),
        })
    }
}

/// Graph present before the workers start: vertex keys `1..=vertices` and
/// each key-ascending pair `(i, j)` with probability `density`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialGraph {
    pub vertices: u32,
    /// `1.0` gives the complete acyclic graph.
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorkloadSpec {
    pub name: String,
    pub mix: Mix,
    pub key_range: u32,
    pub threads: usize,
    pub duration: Duration,
    /// Stop each worker after this many operations, whichever comes first.
    pub ops_per_thread: Option<u64>,
    pub seed: u64,
    pub variant: Variant,
    pub acyclic: bool,
    pub initial: InitialGraph,
    /// Runs to average over.
    pub iterations: u32,
}

impl WorkloadSpec {
    pub fn new(preset: Preset) -> Self {
        WorkloadSpec {
            name: preset.name().to_string(),
            mix: preset.mix(),
            key_range: 1000,
            threads: 1,
            duration: Duration::from_secs(2),
            ops_per_thread: None,
            seed: 0,
            variant: Variant::NoDie,
            acyclic: false,
            initial: InitialGraph {
                vertices: 1000,
                density: 1.0,
            },
            iterations: 1,
        }
    }

    /// Threads actually spawned: the sequential graph is single-threaded.
    pub fn effective_threads(&self) -> usize {
        if self.variant == Variant::Seq {
            1
        } else {
            self.threads
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let sum: u32 = self.mix.0.iter().map(|&p| p as u32).sum();
        if sum != 100 {
            return Err(SpecError::MixSum(sum));
        }
        if self.key_range == 0 {
            return Err(SpecError::EmptyKeyRange);
        }
        if self.threads == 0 {
            return Err(SpecError::NoThreads);
        }
        if self.effective_threads() > self.key_range as usize {
            return Err(SpecError::TooManyThreads {
                threads: self.threads,
                range: self.key_range,
            });
        }
        if self.initial.vertices > self.key_range {
            return Err(SpecError::InitialTooLarge {
                initial: self.initial.vertices,
                range: self.key_range,
            });
        }
        if !(0.0..=1.0).contains(&self.initial.density) {
            return Err(SpecError::Density(self.initial.density));
        }
        if self.iterations == 0 {
            return Err(SpecError::NoIterations);
        }
        if self.duration.is_zero() && self.ops_per_thread.is_none() {
            return Err(SpecError::Unbounded);
        }
        Ok(())
    }

    /// Row label: variant name, suffixed for acyclic runs.
    pub fn label(&self) -> String {
        if self.acyclic {
            format!("{}-acyclic", self.variant)
        } else {
            self.variant.to_string()
        }
    }
}

/// Update-dominated, contains-dominated and edge-update presets with the
/// default key range, duration and initial graph.
pub fn builtin_workloads() -> [WorkloadSpec; 3] {
    Preset::ALL.map(WorkloadSpec::new)
}
