use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn concgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_concgraph")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn bench_writes_one_row_per_variant_and_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = concgraph(&[
        "bench", "--workload", "edges", "--variant", "nodie,die", "--threads", "1,2", "--secs", "0.05", "--keys", "64",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows[0], ["workload", "variant", "threads", "ops_per_sec", "failed_addedge", "false_positives"]);
    let keys: Vec<(&str, &str)> = rows[1..].iter().map(|r| (r[1].as_str(), r[2].as_str())).collect();
    assert_eq!(keys, [("nodie", "1"), ("nodie", "2"), ("die", "1"), ("die", "2")]);
    assert!(rows[1..].iter().all(|r| r[0] == "edges" && r[3].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small run\nworkload = contains\nthreads = 3\nsecs = 0.05\nkeys = 50\nacyclic = true\n").unwrap();
    let o = concgraph(&["bench", "--config", cfg.to_str().unwrap(), "--threads", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[1][..3], ["contains", "nodie-acyclic", "2"]);
}

#[test]
fn bad_settings_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "speed = 11\n").unwrap();
    let o = concgraph(&["bench", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));

    let o = concgraph(&["bench", "--variant", "turbo", "--secs", "0.01"]);
    assert!(!o.status.success());
}

fn record(dir: &Path, flavor: &str, seed: &str) -> String {
    let path = dir.join(format!("{flavor}-{seed}.txt"));
    let o = concgraph(&["record", "--flavor", flavor, "--seed", seed, "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path.to_str().unwrap().to_string()
}

#[test]
fn recorded_histories_verify() {
    let dir = tempfile::tempdir().unwrap();
    for flavor in ["plain", "acyclic"] {
        for seed in ["1", "2", "3"] {
            let path = record(dir.path(), flavor, seed);
            let o = concgraph(&["verify", "--history", &path, "--witness"]);
            assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
            assert!(stdout(&o).starts_with("linearizable"));
        }
    }
}

#[test]
fn verify_rejects_an_impossible_history() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    // vertex 5 is present and never removed, yet a later lookup misses it
    fs::write(
        &path,
        "# flavor plain\n0 1 add_vertex 5 inv -\n1 1 add_vertex 5 resp true\n2 2 contains_vertex 5 inv -\n3 2 contains_vertex 5 resp false\n",
    )
    .unwrap();
    let o = concgraph(&["verify", "--history", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NOT linearizable"));

    fs::write(&path, "0 1 add_vertex five inv -\n").unwrap();
    let o = concgraph(&["verify", "--history", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn false_positive_histories_depend_on_the_rule() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fp.txt");
    // two overlapping inserts that would each close a cycle with the other;
    // both fail, although either one alone would have succeeded
    let h = "\
0 0 add_vertex 1 inv -
1 0 add_vertex 1 resp true
2 0 add_vertex 2 inv -
3 0 add_vertex 2 resp true
4 1 acyclic_add_edge 1,2 inv -
5 2 acyclic_add_edge 2,1 inv -
6 1 acyclic_add_edge 1,2 resp false
7 2 acyclic_add_edge 2,1 resp false
";
    fs::write(&path, h).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(concgraph(&["verify", "--history", p]).status.code(), Some(0));
    assert_eq!(concgraph(&["verify", "--history", p, "--rule", "exact"]).status.code(), Some(1));
}

#[test]
fn audit_passes_on_the_concurrent_graph() {
    for extra in [&[][..], &["--die"][..]] {
        let mut args = vec!["audit", "--ops", "20000", "--threads", "4", "--keys", "64"];
        args.extend_from_slice(extra);
        let o = concgraph(&args);
        assert!(o.status.success(), "{}", stdout(&o));
        assert!(stdout(&o).contains("final audit pass"));
    }
}
