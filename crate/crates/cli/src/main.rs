mod config;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use concgraph::baselines::CoarseLockGraph;
use concgraph::verify::{self, AcyclicRule, CheckOptions, History, HistoryWorkload, Verdict};
use concgraph::workload::{
    build_graph, emit_csv, run_benchmark, run_on, seed_initial_graph, BenchResult, InitialGraph, Mix, Preset, Probe,
    Variant, WorkloadSpec,
};
use concgraph::{AcyclicGraph, ConcGraph, Flavor, GraphConfig};

use config::Config;

#[derive(Parser)]
#[command(name = "concgraph", version, about = "Concurrent graph benchmarks and correctness tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure throughput and write one CSV row per variant and thread count.
    Bench(BenchArgs),
    /// Record a small concurrent history to a file.
    Record(RecordArgs),
    /// Check a recorded history for linearizability.
    Verify(VerifyArgs),
    /// Run a concurrent acyclic workload and audit it for cycles.
    Audit(AuditArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Settings file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// update, contains or edges.
    #[arg(long)]
    workload: Option<String>,
    /// Comma-separated: nodie, die, coarse, seq.
    #[arg(long)]
    variant: Option<String>,
    /// Use the acyclic graph flavor.
    #[arg(long)]
    acyclic: bool,
    /// Comma-separated thread counts.
    #[arg(long)]
    threads: Option<String>,
    /// Seconds per iteration (default 2).
    #[arg(long)]
    secs: Option<f64>,
    /// Size of the vertex key range.
    #[arg(long)]
    keys: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Iterations averaged per row.
    #[arg(long)]
    iters: Option<u32>,
    /// Vertices in the initial graph (default: the key range).
    #[arg(long)]
    initial: Option<u32>,
    /// Probability of each key-ascending initial edge; 1 gives a complete DAG.
    #[arg(long)]
    density: Option<f64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Plain,
    Acyclic,
}

#[derive(Args)]
struct RecordArgs {
    #[arg(long, value_enum, default_value = "plain")]
    flavor: FlavorArg,
    /// nodie, die or coarse.
    #[arg(long, default_value = "nodie")]
    variant: String,
    #[arg(long, default_value_t = 4)]
    threads: usize,
    /// Calls per thread.
    #[arg(long, default_value_t = 6)]
    ops: usize,
    #[arg(long, default_value_t = 8)]
    keys: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    /// Acyclic insertions must fail only when the edge closes a cycle.
    Exact,
    /// Also accept failed acyclic insertions caused by a concurrent insert.
    Relaxed,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    history: PathBuf,
    #[arg(long, value_enum, default_value = "relaxed")]
    rule: RuleArg,
    /// Search states to explore before giving up.
    #[arg(long, default_value_t = 2_000_000)]
    budget: u64,
    /// Print the linearization found.
    #[arg(long)]
    witness: bool,
}

#[derive(Args)]
struct AuditArgs {
    /// Total operations across all threads.
    #[arg(long, default_value_t = 100_000)]
    ops: u64,
    #[arg(long, default_value_t = 8)]
    threads: usize,
    #[arg(long, default_value_t = 200)]
    keys: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Delete incoming edges on vertex removal.
    #[arg(long)]
    die: bool,
    /// Stop-the-world check interval in milliseconds.
    #[arg(long, default_value_t = 50)]
    probe_ms: u64,
}

fn list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.split(',')
        .map(|x| x.trim().parse::<T>().with_context(|| format!("bad list item {x:?}")))
        .collect()
}

fn bench(a: BenchArgs) -> Result<ExitCode> {
    let cfg = match &a.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let preset: Preset = match a.workload.or(cfg.get("workload")?) {
        Some(w) => w.parse()?,
        None => Preset::Update,
    };
    let variants: Vec<Variant> = list(&a.variant.or(cfg.get("variant")?).unwrap_or_else(|| "nodie".into()))?;
    let threads: Vec<usize> = list(&a.threads.or(cfg.get("threads")?).unwrap_or_else(|| "1".into()))?;
    let mut base = WorkloadSpec::new(preset);
    base.acyclic = a.acyclic || cfg.get("acyclic")?.unwrap_or(false);
    if let Some(s) = a.secs.or(cfg.get("secs")?) {
        if !(s > 0.0 && s.is_finite()) {
            bail!("secs must be positive");
        }
        base.duration = Duration::from_secs_f64(s);
    }
    base.key_range = a.keys.or(cfg.get("keys")?).unwrap_or(base.key_range);
    base.seed = a.seed.or(cfg.get("seed")?).unwrap_or(base.seed);
    base.iterations = a.iters.or(cfg.get("iters")?).unwrap_or(base.iterations);
    base.initial = InitialGraph {
        vertices: a.initial.or(cfg.get("initial")?).unwrap_or(base.key_range),
        density: a.density.or(cfg.get("density")?).unwrap_or(base.initial.density),
    };
    let out: Option<PathBuf> = a.out.or(cfg.get("out")?);

    let mut results: Vec<BenchResult> = Vec::new();
    for &variant in &variants {
        for &t in &threads {
            let spec = WorkloadSpec {
                variant,
                threads: t,
                ..base.clone()
            };
            let r = run_benchmark(&spec).with_context(|| format!("{} with {t} threads", spec.label()))?;
            eprintln!(
                "{:>10} {:>16} {:>3} threads  {:>12.0} ops/s  failed add_edge {:>8}  false positives {}{}",
                r.workload,
                r.variant,
                r.threads,
                r.ops_per_sec,
                r.failed_add_edge,
                r.false_positives,
                match r.audit_passed {
                    Some(false) => "  CYCLE FOUND",
                    _ => "",
                }
            );
            results.push(r);
        }
    }
    match out {
        Some(p) => emit_csv(fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?, &results)?,
        None => emit_csv(io::stdout().lock(), &results)?,
    }
    let cyclic = results.iter().any(|r| r.audit_passed == Some(false));
    Ok(if cyclic { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn record(a: RecordArgs) -> Result<ExitCode> {
    let w = HistoryWorkload {
        threads: a.threads,
        ops_per_thread: a.ops,
        key_range: a.keys,
        seed: a.seed,
        ..Default::default()
    };
    if a.threads == 0 || a.keys < 1 {
        bail!("need at least one thread and one key");
    }
    let config = GraphConfig::default();
    let h = match (a.flavor, a.variant.parse::<Variant>()?) {
        (FlavorArg::Plain, v @ (Variant::NoDie | Variant::Die)) => {
            verify::record(&w, &ConcGraph::with_config(config.with_die(v == Variant::Die)))
        }
        (FlavorArg::Acyclic, v @ (Variant::NoDie | Variant::Die)) => {
            verify::record(&w, &AcyclicGraph::with_config(config.with_die(v == Variant::Die)))
        }
        (FlavorArg::Plain, Variant::Coarse) => verify::record(&w, &CoarseLockGraph::new(Flavor::Plain)),
        (FlavorArg::Acyclic, Variant::Coarse) => verify::record(&w, &CoarseLockGraph::new(Flavor::Acyclic)),
        (_, Variant::Seq) => bail!("the sequential graph cannot be shared between threads"),
    }?;
    match a.out {
        Some(p) => fs::write(&p, h.to_text()).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().lock().write_all(h.to_text().as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_history(a: VerifyArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.history).with_context(|| format!("reading {}", a.history.display()))?;
    let h: History = text.parse().with_context(|| format!("parsing {}", a.history.display()))?;
    h.check_well_formed()?;
    let rule = match a.rule {
        RuleArg::Exact => AcyclicRule::Exact,
        RuleArg::Relaxed => AcyclicRule::AllowFalsePositives,
    };
    let verdict = verify::check_linearizable(&h, CheckOptions { rule, budget: a.budget });
    match verdict {
        Verdict::Linearizable(order) => {
            println!("linearizable ({} events, {} pending)", h.len(), h.pending().len());
            if a.witness {
                for l in order {
                    let note = if l.completed { " (completed)" } else { "" };
                    println!("  t{} {} -> {}{note}", l.thread, l.op, l.ret);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Verdict::NotLinearizable => {
            println!("NOT linearizable");
            Ok(ExitCode::from(1))
        }
        Verdict::Inconclusive { explored } => {
            println!("inconclusive: budget exhausted after {explored} states");
            Ok(ExitCode::from(2))
        }
    }
}

fn audit(a: AuditArgs) -> Result<ExitCode> {
    if a.threads == 0 {
        bail!("need at least one thread");
    }
    let mut spec = WorkloadSpec::new(Preset::Edges);
    spec.name = "edges+churn".into();
    spec.mix = Mix::new(5, 36, 5, 54, 0, 0)?;
    spec.variant = if a.die { Variant::Die } else { Variant::NoDie };
    spec.acyclic = true;
    spec.threads = a.threads;
    spec.key_range = a.keys;
    spec.initial = InitialGraph {
        vertices: a.keys,
        density: 1.0,
    };
    spec.duration = Duration::ZERO;
    spec.ops_per_thread = Some(a.ops.div_ceil(a.threads as u64));
    spec.seed = a.seed;
    spec.validate()?;

    let graph = build_graph(spec.variant, true);
    seed_initial_graph(graph.ops(), spec.initial, spec.seed);
    let check = |s: &concgraph::Snapshot| verify::audit_snapshot(s);
    let probe = Probe {
        every: Duration::from_millis(a.probe_ms.max(1)),
        check: &check,
    };
    let run = run_on(&graph, &spec, 0, Some(&probe))?;
    let probes_ok = run.probes.iter().filter(|&&p| p).count();
    let passed = run.audit == Some(true) && probes_ok == run.probes.len();
    println!(
        "{} ops by {} threads in {:.2}s; probes {probes_ok}/{} acyclic; final audit {}; {} false positives",
        run.counts.total(),
        a.threads,
        run.elapsed.as_secs_f64(),
        run.probes.len(),
        if run.audit == Some(true) { "pass" } else { "FAIL" },
        run.false_positives,
    );
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Bench(a) => bench(a),
        Command::Record(a) => record(a),
        Command::Verify(a) => verify_history(a),
        Command::Audit(a) => audit(a),
    }
}
