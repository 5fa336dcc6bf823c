use serde_json::Value;
use std::process::Command;

fn dynhopf(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dynhopf")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn verify_all_at_three_exits_zero() {
    let (code, out) = dynhopf(&["verify", "--type", "A1", "--ell", "3", "--suite", "all"]);
    assert_eq!(code, 0, "{out}");
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["status"], "pass");
    assert_eq!(doc["summary"]["failed"], 0);
}

#[test]
fn invalid_specs_exit_two() {
    assert_eq!(dynhopf(&["verify", "--type", "A1", "--ell", "4"]).0, 2);
    assert_eq!(dynhopf(&["verify", "--type", "A1", "--ell", "3", "--lambda", "1"]).0, 2);
    assert_eq!(dynhopf(&["verify", "--type", "B2", "--ell", "5"]).0, 2);
    assert_eq!(dynhopf(&["verify", "--ell", "nope"]).0, 2);
    assert_eq!(dynhopf(&["dump", "nothing"]).0, 2);
}

#[test]
fn failed_check_exits_one() {
    let (code, out) = dynhopf(&["verify", "--type", "A2", "--ell", "5", "--lambda", "2,2", "--suite", "bd"]);
    assert_eq!(code, 1);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["status"], "fail");
}

#[test]
fn ranks_dump_lists_27_blocks_of_rank_9() {
    let (code, out) = dynhopf(&["dump", "ranks", "--type", "A1", "--ell", "3"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let blocks = doc["data"]["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 27);
    assert!(blocks.iter().all(|b| b["rank"] == 9));
}

#[test]
fn torus_level_j_dump_for_swap() {
    let (code, out) = dynhopf(&["dump", "J", "--type", "A2", "--ell", "5", "--triple", "swap"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert!(!doc["data"]["Z"]["terms"].as_array().unwrap().is_empty());
    // b_ij for i, j ∈ {0, 1} at each λ ∈ 𝕋_L
    assert_eq!(doc["data"]["b"].as_array().unwrap().len() % 4, 0);
}
