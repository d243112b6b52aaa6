use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn naqkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_naqkit")).args(args).output().expect("spawn naqkit")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const CORPUS: &str = r#"{"id":"a","x":"0110","predicate":"equals_instance"}
{"id":"b","x":"","predicate":"nonempty"}
{"id":"c","x":"1","predicate":"never"}
{"id":"d","x":"11","predicate":"ends_with_one"}
"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn encode_round_trips() {
    let o = naqkit(&["encode", "5"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["report"]["code"], "00101");
    assert_eq!(v["report"]["decodes_to"], 5);
    assert_eq!(v["manifest"]["command"], "encode");
    assert!(v["constants"]["constants"]["c_cond"].is_number());
}

#[test]
fn prefix_check_exit_reflects_verdict() {
    assert_eq!(code(&naqkit(&["prefix-check", "0", "10", "11"])), 0);
    let bad = naqkit(&["prefix-check", "0", "01"]);
    assert_eq!(code(&bad), 1);
    assert_eq!(json(&bad)["report"]["prefix_free"], false);
}

#[test]
fn reference_executor_example() {
    let v = json(&naqkit(&["exec", "00100101", "--executor", "reference"]));
    assert_eq!(v["report"]["output"], "101");
    assert_eq!(v["report"]["steps"], 8);
}

#[test]
fn khat_csv_columns() {
    let o = naqkit(&["khat", "1", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,method,caps,value,witness_hex"));
    assert!(lines.next().unwrap().starts_with("1,exact,20/65536,8,"));
}

#[test]
fn bad_method_is_usage() {
    assert_eq!(code(&naqkit(&["khat", "1", "--method", "gzip"])), 2);
}

#[test]
fn unknown_suite_is_usage() {
    let o = naqkit(&["verify", "nope"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
}

#[test]
fn unknown_flag_is_usage() {
    assert_eq!(code(&naqkit(&["encode", "3", "--frobnicate"])), 2);
}

#[test]
fn missing_fixture_dir_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = naqkit(&["verify", "identity", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing fixture file"));
}

#[test]
fn profile_then_rank() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.jsonl", CORPUS);
    let pool = dir.path().join("p.jsonl");
    let o = naqkit(&["profile", &corpus, "--out", pool.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&pool).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("unknown_at_budget"));

    let r = naqkit(&["naq", "rank", pool.to_str().unwrap(), "--id", "a"]);
    assert_eq!(code(&r), 0);
    let v = json(&r);
    // pool {11, 8, 8}: one below, none tied besides itself
    assert_eq!(v["report"]["query"]["naq"], "5/6");
    assert_eq!(v["report"]["unknown_at_budget"], 1);

    let unknown = naqkit(&["naq", "rank", pool.to_str().unwrap(), "--id", "c"]);
    assert_eq!(code(&unknown), 3);
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("unknown at budget"));
}

#[test]
fn rank_by_value() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write(
        dir.path(),
        "p.jsonl",
        "{\"id\":\"a\",\"m\":3,\"method\":\"exact\",\"status\":\"exact\"}\n\
         {\"id\":\"b\",\"m\":5,\"method\":\"exact\",\"status\":\"exact\"}\n\
         {\"id\":\"c\",\"m\":5,\"method\":\"exact\",\"status\":\"exact\"}\n\
         {\"id\":\"d\",\"m\":8,\"method\":\"exact\",\"status\":\"exact\"}\n",
    );
    let v = json(&naqkit(&["naq", "rank", &pool, "--m", "5"]));
    assert_eq!(v["report"]["query"]["naq"], "1/2");
    let csv = naqkit(&["naq", "rank", &pool, "--format", "csv"]);
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("id,m,naq,bucket,bucket_naq\n"));
}

#[test]
fn malformed_pool_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write(dir.path(), "p.jsonl", "{\"id\":\"a\",\"m\":\n");
    assert_eq!(code(&naqkit(&["naq", "rank", &pool])), 3);
    assert_eq!(code(&naqkit(&["naq", "rank", "/nonexistent/pool.jsonl"])), 3);
}

#[test]
fn stability_on_nested_pools() {
    let dir = tempfile::tempdir().unwrap();
    let line = |id: &str, m: u64| format!("{{\"id\":\"{id}\",\"m\":{m},\"method\":\"exact\",\"status\":\"exact\"}}\n");
    let t = write(dir.path(), "t.jsonl", &(line("a", 3) + &line("b", 5)));
    let tp = write(dir.path(), "tp.jsonl", &(line("a", 3) + &line("b", 5) + &line("c", 9)));
    let o = naqkit(&["naq", "stability", &t, &tp]);
    assert_eq!(code(&o), 0);
    let not_nested = write(dir.path(), "x.jsonl", &line("z", 4));
    assert_eq!(code(&naqkit(&["naq", "stability", &not_nested, &tp])), 3);
}

#[test]
fn band_needs_one_of_epsilon_or_confidence() {
    let v = json(&naqkit(&["naq", "band", "--n", "1000", "--epsilon", "0.05"]));
    let b = v["report"]["tail_bound"].as_f64().unwrap();
    assert!((b - 2.0 * (-5.0f64).exp()).abs() < 1e-12);
    assert_eq!(code(&naqkit(&["naq", "band", "--n", "1000"])), 2);
}

#[test]
fn bounds_subcommands() {
    let f = json(&naqkit(&["bounds", "fano", "--h", "3", "--epsilon", "0", "--support", "8"]));
    assert_eq!(f["report"]["bound_bits"], 2.0);
    assert_eq!(code(&naqkit(&["bounds", "identity", "--n", "4"])), 0);
    assert_eq!(code(&naqkit(&["bounds", "panel", "--size", "4"])), 0);
    assert_eq!(code(&naqkit(&["bounds", "gc", "--p", "0.1", "--n", "10", "--trials", "2000"])), 0);
    assert_eq!(code(&naqkit(&["bounds", "fano", "--h", "3", "--epsilon", "1.5", "--support", "8"])), 2);
}

#[test]
fn verify_is_deterministic_and_seed_sensitive() {
    let a = naqkit(&["verify", "naq", "--seed", "7"]);
    let b = naqkit(&["verify", "naq", "--seed", "7"]);
    let c = naqkit(&["verify", "naq", "--seed", "8"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_csv_summary() {
    let o = naqkit(&["verify", "fano", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("suite,check,gated,pass"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn registry_lists_versions() {
    let v = json(&naqkit(&["registry"]));
    assert_eq!(v["report"]["versions"]["machine"], "ub-8op-v1");
    assert_eq!(v["report"]["constants"]["a"], 1.0);
}
