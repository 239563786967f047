use std::process::Command;

use eightrank_cli::{run, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("eightrank").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn pair_73_89_is_yes() {
    let (code, out, _) = call(&["pair", "--d", "-4", "-p", "73", "-q", "89"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["epsilon"], 1);
    assert_eq!(v["predicts_rk8"], "Yes");
    assert_eq!((v["x"].as_i64(), v["y"].as_i64()), (Some(-49), Some(64)));
}

#[test]
fn pair_with_oracle_confirms_rank() {
    let (code, out, _) = call(&["pair", "--d=-4", "-p", "73", "-q", "89", "--oracle"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["oracle"]["discriminant"], -25988);
    assert!(v["oracle"]["rk8"].as_u64().unwrap() >= 1);
}

#[test]
fn pair_17_89_records() {
    let v = json(&call(&["pair", "--d", "-4", "-p", "17", "-q", "89"]).1);
    assert_eq!(v["predicts_rk8"], "No");
    assert_eq!(v["flag_split2"], true);
    let v = json(&call(&["pair", "--d", "8", "-p", "17", "-q", "89"]).1);
    assert_eq!(v["predicts_rk8"], "Inapplicable");
    assert_eq!((v["x"].as_i64(), v["y"].as_i64()), (Some(71), Some(42)));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(call(&["pair", "--d", "5", "-p", "17", "-q", "89"]).0, EXIT_USAGE);
    assert_eq!(call(&["pair", "--d", "-4", "-p", "17", "-q", "17"]).0, EXIT_USAGE);
    assert_eq!(call(&["pair", "--d", "-4", "-p", "17", "-q", "41"]).0, EXIT_USAGE);
    assert_eq!(call(&["census", "--d", "8", "--xmax", "1000000000"]).0, EXIT_USAGE);
    assert_eq!(call(&["verify", "--suite", "nonesuch"]).0, EXIT_USAGE);
    assert_eq!(call(&["oracle", "--disc", "-16"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["charsum", "scan", "--d", "8", "--delta", "3/2"]).0, EXIT_USAGE);
}

#[test]
fn help_exits_0() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("census"));
}

#[test]
fn census_csv_schema() {
    let (code, out, _) = call(&["census", "--d", "8", "--xmax", "1000000", "--checkpoints", "10"]);
    assert_eq!(code, EXIT_OK);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[0], "X");
    assert!(header.iter().any(|h| h == "ratio_pred"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    assert_eq!(&rows[9][0], "1000000");
}

#[test]
fn census_json_has_exact_weights() {
    let (code, out, _) = call(&["census", "--d", "-4", "--xmax", "20000", "--checkpoints", "2", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["cl_weights"]["ratio"], "5/8");
    assert_eq!(v["rows"][1]["n_oracle_violations"], 0);
    assert_eq!(v["rows"][1]["n_oracle_rk4_2"], v["rows"][1]["n_rk4_2"]);
}

#[test]
fn verify_keycancellation_counts_pairs() {
    let (code, out, _) = call(&["verify", "--suite", "keycancellation", "--max-norm", "60", "--samples", "10"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    let s = &v["suites"][0];
    assert_eq!(s["suite"], "keycancellation");
    assert_eq!(s["failures"], 0);
    let pairs: u64 = ["d=-4:exhaustive_pairs", "d=8:exhaustive_pairs"]
        .iter()
        .map(|k| s["details"][k].as_u64().unwrap())
        .sum();
    let ideals = |k: &str| s["details"][k].as_u64().unwrap();
    assert_eq!(pairs, ideals("d=-4:ideals").pow(2) + ideals("d=8:ideals").pow(2));
}

#[test]
fn verify_prop4rank_with_oracle_flag() {
    let (code, out, _) = call(&["verify", "--suite", "prop4rank", "--oracle", "--pqmax", "20000"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn charsum_key_examples() {
    let v = json(&call(&["charsum", "key", "--d", "-4", "--w1", "1,2", "--w2", "1,2"]).1);
    assert_eq!((v["measured"].as_i64().unwrap().abs(), v["W"].as_u64()), (500, Some(25)));
    let v = json(&call(&["charsum", "key", "--d", "-4", "--w1", "1,2", "--w2", "3,2"]).1);
    assert_eq!(v["predicted_abs"], 0);
    let v = json(&call(&["charsum", "key", "--d", "-4", "--w1", "1,2", "--w2", "1,-2"]).1);
    assert_eq!((v["r"].as_u64(), v["measured"].as_i64()), (Some(5), Some(0)));
    assert_eq!(call(&["charsum", "key", "--d", "-4", "--w1", "5,0", "--w2", "1,2"]).0, EXIT_USAGE);
}

#[test]
fn charsum_scan_csv() {
    let (code, out, _) = call(&["charsum", "scan", "--d", "-4", "--exponents", "10,12"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("d,M,N,Delta,mode,value,normalized"));
    assert_eq!(lines.next(), Some("-4,1024,1024,0.125,B0,0,0.0"));
}

#[test]
fn charsum_delta_sqrt2() {
    let v = json(&call(&["charsum", "delta", "--d", "8"]).1);
    assert_eq!(v["entries"].as_array().unwrap().len(), 1024);
    assert!(v["min_samples"].as_u64().unwrap() >= 1000);
}

#[test]
fn oracle_examples() {
    let v = json(&call(&["oracle", "--disc", "-20"]).1);
    assert_eq!((v["order"].as_u64(), v["rk2"].as_u64()), (Some(2), Some(1)));
    let v = json(&call(&["oracle", "--d", "-4", "-p", "17", "-q", "89"]).1);
    assert_eq!(v["discriminant"], -6052);
    assert_eq!(v["rk4"], 2);
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("eightrank-cli-test-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, out, _) = call(&["oracle", "--disc", "40", "--output", p]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let v = json(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(v["order"], 2);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["census", "--d", "-4", "--xmax", "300000", "--checkpoints", "7", "--format", "json"];
    let one = call(&[&["--threads", "1"][..], &args].concat()).1;
    let four = call(&[&["--threads", "4"][..], &args].concat()).1;
    assert_eq!(one, four);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_eightrank");
    let ok = Command::new(bin).args(["pair", "--d", "-4", "-p", "73", "-q", "89"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let bad = Command::new(bin).args(["pair", "--d", "3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(!bad.stderr.is_empty());
}

#[test]
fn empty_verification_is_a_failure() {
    let (code, out, _) = call(&["verify", "--d", "8", "--suite", "reciprocitylem", "--max-norm", "0"]);
    assert_eq!(code, eightrank_cli::EXIT_VIOLATION);
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert_eq!(v["suites"][0]["checked"], 0);
}
