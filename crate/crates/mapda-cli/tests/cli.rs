use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mapda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapda")).args(args).output().expect("binary runs")
}

fn mapda_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapda")).args(args).env("MAPDA_THREADS", threads).output().expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL: [&str; 10] = ["--lambda", "5", "--r", "3", "--t", "1", "--b", "1", "--L", "2"];
const MERGED: [&str; 10] = ["--lambda", "6", "--r", "3", "--t", "2", "--b", "2", "--L", "3"];

fn construct(extra: &[&str], net: &[&str]) -> Output {
    let mut args = vec!["construct"];
    args.extend_from_slice(net);
    args.extend_from_slice(extra);
    mapda(&args)
}

fn assert_metrics(v: &Value, k: u64, f: u64, z: u64, s: u64, g: &str) {
    assert_eq!((v["K"].as_u64(), v["F"].as_u64(), v["Z"].as_u64(), v["S"].as_u64()), (Some(k), Some(f), Some(z), Some(s)), "{v}");
    assert_eq!(v["sum_dof"], g, "{v}");
}

#[test]
fn construct_knapsack_example() {
    let out = construct(&["--method", "thm1", "--solver", "dp"], &SMALL);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_metrics(&json_stdout(&out), 10, 15, 9, 10, "6");
}

#[test]
fn construct_merged_example() {
    let out = construct(&["--method", "thm4"], &MERGED);
    assert_eq!(code(&out), 0);
    assert_metrics(&json_stdout(&out), 20, 45, 36, 10, "18");
}

#[test]
fn construct_sub_network_matches_baseline() {
    let out = mapda(&["construct", "--lambda", "9", "--r", "3", "--t", "2", "--L", "4", "--method", "thm5", "--lambda-prime", "6"]);
    assert_eq!(code(&out), 0);
    assert_metrics(&json_stdout(&out), 84, 144, 84, 252, "20");
}

#[test]
fn auto_shift_reports_chosen_b() {
    let out = mapda(&["construct", "--lambda", "6", "--r", "3", "--t", "2", "--L", "3", "--b-mode", "auto"]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    assert!(v["b"].as_u64().unwrap() < 3);
}

#[test]
fn knapsack_instance_and_solution() {
    let mut args = vec!["knapsack"];
    args.extend_from_slice(&MERGED);
    let v = json_stdout(&mapda(&args));
    let groups: Vec<&str> = v["items"].as_array().unwrap().iter().map(|i| i["group"].as_str().unwrap()).collect();
    assert_eq!(groups, ["45", "46", "56", "456"]);
    let values: Vec<u64> = v["items"].as_array().unwrap().iter().map(|i| i["v"].as_u64().unwrap()).collect();
    assert_eq!(values, [3, 3, 3, 1]);
    assert_eq!(v["L"], 3);
    assert_eq!(v["phi"], 9);
    assert_eq!(v["x"]["45"], 1);
    assert_eq!(v["x"]["456"], 0);
}

#[test]
fn round_trip_expanded_and_compact() {
    let dir = TempDir::new().unwrap();
    for (format, net, g) in [("expanded", &SMALL, "6"), ("compact", &SMALL, "6"), ("expanded", &MERGED, "18"), ("compact", &MERGED, "18")] {
        let file = dir.path().join(format!("{format}-{g}.json"));
        let method = if g == "18" { "thm4" } else { "thm1" };
        let built = construct(&["--method", method, "--out", path_str(&file), "--format", format], net);
        assert_eq!(code(&built), 0);
        let printed = json_stdout(&built);

        let checked = mapda(&["verify", "--in", path_str(&file)]);
        assert_eq!(code(&checked), 0, "{format}: {}", String::from_utf8_lossy(&checked.stdout));
        let report = json_stdout(&checked);
        assert_eq!(report["valid"], true);
        assert_eq!(report["C1"]["Z"], printed["Z"]);

        let sim = mapda(&["simulate", "--in", path_str(&file), "--seed", "5", "--trials", "4"]);
        assert_eq!(code(&sim), 0);
        let rep = json_stdout(&sim);
        assert_eq!(rep["all_decoded"], true);
        assert_eq!(rep["measured_dof"], printed["sum_dof"]);
        assert_eq!(rep["trials"], 4);
    }
}

#[test]
fn mutated_array_fails_verification() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("q.json");
    assert_eq!(code(&construct(&["--out", path_str(&file)], &SMALL)), 0);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    // copy one block into a second row of the same column
    let entries = v["entries"].as_array_mut().unwrap();
    let col = 0;
    let filled: Vec<usize> = (0..entries.len()).filter(|&r| entries[r][col].is_u64()).collect();
    let symbol = entries[filled[0]][col].clone();
    entries[filled[1]][col] = symbol;
    let mutated = dir.path().join("mutated.json");
    fs::write(&mutated, serde_json::to_string(&v).unwrap()).unwrap();

    let out = mapda(&["verify", "--in", path_str(&mutated)]);
    assert_eq!(code(&out), 1);
    let report = json_stdout(&out);
    assert_eq!(report["valid"], false);
    assert_eq!(report["C3"]["pass"], false);
    assert!(!report["C3"]["violations"].as_array().unwrap().is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("C3"));

    let sim = mapda(&["simulate", "--in", path_str(&mutated)]);
    assert_eq!(code(&sim), 1);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    // usage
    assert_eq!(code(&mapda(&["construct", "--lambda", "5"])), 2);
    assert_eq!(code(&mapda(&["nonsense"])), 2);
    assert_eq!(code(&construct(&["--method", "thm4", "--b-mode", "auto"], &MERGED)), 2);
    assert_eq!(code(&construct(&["--method", "thm5"], &SMALL)), 2);
    assert_eq!(code(&construct(&["--method", "thm4", "--solver", "greedy"], &MERGED)), 2);
    assert_eq!(code(&mapda(&["construct", "--lambda", "5", "--r", "3", "--t", "3", "--L", "2"])), 2);
    assert_eq!(code(&mapda(&["sweep", "--scheme", "bogus", "--lambda", "9", "--r", "2", "--L", "2"])), 2);
    assert_eq!(code(&mapda_env(&["compare"], "0")), 2);
    // constraint
    let merged_bad = construct(&["--method", "thm4"], &SMALL);
    assert_eq!(code(&merged_bad), 3);
    assert!(String::from_utf8_lossy(&merged_bad.stderr).contains("b < r < 2b"));
    assert_eq!(code(&construct(&["--solver", "optimal"], &SMALL)), 3);
    // i/o and parse
    assert_eq!(code(&mapda(&["verify", "--in", path_str(&dir.path().join("missing.json"))])), 4);
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{not json").unwrap();
    assert_eq!(code(&mapda(&["verify", "--in", path_str(&garbage)])), 4);
    assert_eq!(code(&mapda(&["compare", "--rows", path_str(&garbage)])), 4);
}

#[test]
fn fixed_demand_simulation() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("q.json");
    assert_eq!(code(&construct(&["--out", path_str(&file)], &SMALL)), 0);
    let out = mapda(&["simulate", "--in", path_str(&file), "--demand", "1,1,1,1,1,1,1,1,1,1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_stdout(&out)["all_decoded"], true);
    assert_eq!(code(&mapda(&["simulate", "--in", path_str(&file), "--demand", "1,2"])), 2);
    assert_eq!(code(&mapda(&["simulate", "--in", path_str(&file), "--demand", "1,2", "--trials", "3"])), 2);
}

#[test]
fn identical_flags_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let first = construct(&["--method", "thm4", "--out", path_str(&a)], &MERGED);
    let second = construct(&["--method", "thm4", "--out", path_str(&b)], &MERGED);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let sim = |threads| mapda_env(&["simulate", "--in", path_str(&a), "--seed", "9", "--trials", "16"], threads).stdout;
    assert_eq!(sim("1"), sim("4"));

    let (c1, c2) = (dir.path().join("c1.csv"), dir.path().join("c2.csv"));
    for c in [&c1, &c2] {
        assert_eq!(code(&mapda(&["sweep", "--scheme", "co1,co3,wcc", "--lambda", "9", "--r", "2", "--L", "2", "--out", path_str(c)])), 0);
    }
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
    assert_eq!(mapda(&["compare", "--format", "json"]).stdout, mapda_env(&["compare", "--format", "json"], "2").stdout);
}

#[test]
fn compare_reference_and_custom_rows() {
    let out = mapda(&["compare"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let f: Vec<String> = reader.records().map(|r| r.unwrap()[6].to_string()).collect();
    assert_eq!(f.len(), 16);
    assert_eq!(f[0], "140");
    assert_eq!(f[14], "107666559");

    let dir = TempDir::new().unwrap();
    let rows = dir.path().join("rows.json");
    fs::write(&rows, r#"[{"scheme": "npr", "K": 15, "t": 9, "L": 5}, {"scheme": "co4", "nodes": 9, "r": 3, "t": 2, "L": 4, "size": 6}]"#).unwrap();
    let out = mapda(&["compare", "--rows", path_str(&rows), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    assert_eq!(v[0]["F"], 210);
    assert_eq!(v[1]["F"], 144);

    fs::write(&rows, "[]").unwrap();
    let out = mapda(&["compare", "--rows", path_str(&rows)]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn sweep_writes_csv() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("data.csv");
    let out = mapda(&["sweep", "--scheme", "co1,co3,wcc", "--lambda", "9", "--r", "2", "--L", "2", "--out", path_str(&file)]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&file).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let schemes: Vec<String> = reader.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert!(schemes.iter().any(|s| s == "co1"));
    assert!(schemes.iter().all(|s| ["co1", "co3", "wcc"].contains(&s.as_str())));
}
