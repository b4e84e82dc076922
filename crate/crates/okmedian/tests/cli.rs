use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn okmedian(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_okmedian")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// TSV record as `(header, value)` pairs.
fn record(text: &str) -> Vec<(String, String)> {
    let mut lines = text.lines();
    let head = lines.next().unwrap().split('\t');
    let row = lines.next().unwrap().split('\t');
    head.zip(row).map(|(h, v)| (h.to_string(), v.to_string())).collect()
}

fn field<'a>(rec: &'a [(String, String)], name: &str) -> &'a str {
    &rec.iter().find(|(h, _)| h == name).unwrap_or_else(|| panic!("no column {name}")).1
}

fn line_file(dir: &Path) -> String {
    let path = dir.join("line.txt");
    fs::write(&path, "4 2\npoints 1\n0\n1\n2\n3\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn gen_is_deterministic_and_readable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--n", "8", "--k", "3", "--seed", "1", "--kind", "euclidean", "--dim", "2"];
    let a = stdout(&okmedian(&args));
    let b = stdout(&okmedian(&args));
    assert_eq!(a, b);
    assert!(a.starts_with("8 3\npoints 2\n"));
    assert_eq!(a.lines().count(), 10);
    let path = dir.path().join("inst.txt");
    fs::write(&path, &a).unwrap();
    let out = okmedian(&["oracle", "--instance", path.to_str().unwrap(), "--weights", "kmedian"]);
    let opt: f64 = field(&record(&stdout(&out)), "opt").parse().unwrap();
    assert!(opt > 0.0);
}

#[test]
fn gen_rejects_k_equal_n() {
    let out = okmedian(&["gen", "--n", "2", "--k", "2", "--kind", "random"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = okmedian(&["solve", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn centrum_one_on_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let inst = line_file(dir.path());
    let out = okmedian(&["solve", "--instance", &inst, "--weights", "centrum 1", "--algorithm", "pd", "--oracle-check"]);
    let rec = record(&stdout(&out));
    assert_eq!(field(&rec, "algorithm"), "pd");
    assert_eq!(field(&rec, "opt"), "1.0");
    let cost: f64 = field(&rec, "cost").parse().unwrap();
    assert!(cost <= 12.4, "cost {cost}");
    assert!(!field(&rec, "elapsed_ms").is_empty());
}

#[test]
fn auto_routes_general_weights() {
    let dir = tempfile::tempdir().unwrap();
    let inst = line_file(dir.path());
    let wfile = dir.path().join("w.txt");
    fs::write(&wfile, "3 2 1 1\n").unwrap();
    let out = okmedian(&["solve", "--instance", &inst, "--weights", wfile.to_str().unwrap(), "--oracle-check"]);
    let rec = record(&stdout(&out));
    assert_eq!(field(&rec, "algorithm"), "general");
    assert_eq!(field(&rec, "eps"), "1.0");
    assert!(!field(&rec, "guess").is_empty());

    let out = okmedian(&["solve", "--instance", &inst, "--weights", "centrum 2"]);
    assert_eq!(field(&record(&stdout(&out)), "algorithm"), "pd");
}

#[test]
fn pd_rejects_general_weights() {
    let dir = tempfile::tempdir().unwrap();
    let inst = line_file(dir.path());
    let out = okmedian(&["solve", "--instance", &inst, "--weights", "3 2 1 1", "--algorithm", "pd"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.txt");
    let text = stdout(&okmedian(&["gen", "--n", "9", "--k", "3", "--seed", "5", "--kind", "random"]));
    fs::write(&path, text).unwrap();
    let inst = path.to_str().unwrap();
    for weights in ["centrum 3", "4 3 3 2 2 1 1 1 1"] {
        let run = |threads: &str| {
            stdout(&okmedian(&[
                "solve", "--instance", inst, "--weights", weights, "--threads", threads, "--seed", "7", "--no-elapsed",
                "--scan-b", "--format", "jsonl",
            ]))
        };
        assert_eq!(run("1"), run("8"));
    }
}

#[test]
fn oracle_cap_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.txt");
    fs::write(&path, stdout(&okmedian(&["gen", "--n", "10", "--k", "4", "--kind", "random"]))).unwrap();
    let out = okmedian(&["oracle", "--instance", path.to_str().unwrap(), "--weights", "kmedian", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(4));
    let out = okmedian(&["solve", "--instance", path.to_str().unwrap(), "--weights", "centrum 2", "--oracle-check", "--oracle-cap", "10"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn malformed_instance_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "3 1\nmatrix\n0 1 2\n1 0\n").unwrap();
    let out = okmedian(&["solve", "--instance", path.to_str().unwrap(), "--weights", "centrum 1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_claims_is_clean_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.tsv");
    let run = |out: &Path, threads: &str| {
        let o = okmedian(&["bench", "--suite", "claims", "--trials", "300", "--seed", "4", "--threads", threads, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(out).unwrap()
    };
    let first = run(&a, "1");
    let summary = first.lines().last().unwrap();
    assert!(summary.starts_with("#summary\tsuite=claims\ttrials=300\t"));
    assert!(summary.contains("\tviolations=0\t"));
    assert_eq!(first.lines().count(), 302);
    assert_eq!(first, run(&dir.path().join("b.tsv"), "3"));
}

#[test]
fn bench_lpcheck_jsonl() {
    let text = stdout(&okmedian(&["bench", "--suite", "lpcheck", "--trials", "20", "--format", "jsonl"]));
    let last = text.lines().last().unwrap();
    assert!(last.starts_with(r#"{"kind":"summary","suite":"lpcheck""#));
    assert!(last.contains(r#""violations":0"#));
}
