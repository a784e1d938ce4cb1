use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn graph_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn cycle6() -> NamedTempFile {
    graph_file("6 6\n1 2\n2 3\n3 4\n4 5\n5 6\n6 1\n")
}

fn ftconn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftconn")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn query_prints_connected() {
    let g = cycle6();
    let o = ftconn(&["query", "-g", g.path().to_str().unwrap(), "-f", "2,5", "-s", "3", "-t", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "connected\n");
}

#[test]
fn repeated_pairs_share_one_build() {
    let g = cycle6();
    let o = ftconn(&["query", "-g", g.path().to_str().unwrap(), "-f", "2,5", "-q", "3,4", "-q", "1,3", "--json"]);
    assert_eq!(stdout(&o), "{\"connected\":true}\n{\"connected\":false}\n");
}

#[test]
fn count_and_cut() {
    let g = cycle6();
    let p = g.path().to_str().unwrap();
    assert_eq!(stdout(&ftconn(&["count", "-g", p, "-f", "2,4,6"])), "3\n");
    assert_eq!(stdout(&ftconn(&["count", "-g", p, "-f", "2,4,6", "--json"])), "{\"components\":3}\n");
    assert_eq!(stdout(&ftconn(&["cut", "-g", p, "-f", "1", "--json"])), "{\"cut\":false}\n");
    assert_eq!(stdout(&ftconn(&["cut", "-g", p, "-f", "1,4"])), "cut\n");
}

#[test]
fn too_many_failures_is_a_usage_error() {
    let g = cycle6();
    let o = ftconn(&["query", "-g", g.path().to_str().unwrap(), "-f", "1,2,3,4", "-s", "5", "-t", "6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at most 3 failures"));
}

#[test]
fn domain_errors_exit_one() {
    let g = cycle6();
    let p = g.path().to_str().unwrap();
    assert_eq!(ftconn(&["query", "-g", p, "-f", "2", "-s", "2", "-t", "3"]).status.code(), Some(1));
    assert_eq!(ftconn(&["count", "-g", p, "-f", "9"]).status.code(), Some(1));
    assert_eq!(ftconn(&["count", "-g", "/nonexistent/graph.txt", "-f", "1"]).status.code(), Some(1));
    let disconnected = graph_file("4 2\n1 2\n3 4\n");
    assert_eq!(ftconn(&["count", "-g", disconnected.path().to_str().unwrap(), "-f", "1"]).status.code(), Some(1));
}

#[test]
fn output_is_stable() {
    let g = graph_file("7 8\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 1\n5 1\n");
    let args = ["query", "-g", g.path().to_str().unwrap(), "-f", "1,5", "-q", "2,7", "-q", "3,4", "-q", "6,7"];
    let first = stdout(&ftconn(&args));
    assert_eq!(first, "disconnected\nconnected\nconnected\n");
    assert_eq!(stdout(&ftconn(&args)), first);
}

#[test]
fn verify_and_bench_report() {
    let o = ftconn(&["verify", "--corpus", "book", "--threads", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["graphs"], 50);
    assert_eq!(report["mismatch_count"], 0);
    assert_eq!(ftconn(&["verify", "--corpus", "nope"]).status.code(), Some(1));
    let o = ftconn(&["bench", "-n", "2000", "--queries", "200", "--json"]);
    let b: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(b["vertices"], 2000);
    assert!(b["median_ns"].as_u64().unwrap() <= b["p99_ns"].as_u64().unwrap());
}
