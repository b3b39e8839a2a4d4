use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const A: &str = "0,0,10,10";
const B: &str = "100,0,10,10";
const Z: &str = "500,500,10,10";

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn write(&self, name: &str, content: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, content).unwrap();
        path
    }

    /// Ground truth of the toy examples: id 1 at A, id 2 at B, frames 1-2.
    fn toy_gt(&self) -> PathBuf {
        self.write("gt.txt", &format!("1,1,{A}\n2,1,{A}\n1,2,{B}\n2,2,{B}\n"))
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tgospa")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn empty_tracker_with_offline_preset() {
    let f = Files::new();
    let mut gt = String::new();
    for frame in 1..=213 {
        for id in 1..=25 {
            let _ = writeln!(gt, "{frame},{id},{},0,10,10,1,1,1", id * 20);
        }
    }
    let gt = f.write("gt.txt", &gt);
    let empty = f.write("empty.txt", "");
    let out = json(&run(&["evaluate", "--gt", s(&gt), "--trackers", s(&empty), "--preset", "offline", "--format", "json"]));
    assert_eq!(out["rows"][0]["total"], 1331.25);
    assert_eq!(out["rows"][0]["n_missed"], 5325.0);
}

#[test]
fn identical_tracker_scores_zero_and_ranks_first() {
    let f = Files::new();
    let gt = f.toy_gt();
    let other = f.write("other.txt", &format!("1,7,{Z}\n"));
    let out = json(&run(&[
        "evaluate", "--gt", s(&gt), "--trackers", s(&other), s(&gt), "--c", "0.5", "--p", "2", "--gamma", "0.3", "--format", "json",
    ]));
    assert_eq!(out["rows"][1]["total"], 0.0);
    assert_eq!(out["rows"][1]["rank"], 1);
    assert_eq!(out["rows"][0]["rank"], 2);
    assert_eq!(out["rows"][0]["tracker"], "other");
}

#[test]
fn swapped_tracks_cost_two_switches() {
    let f = Files::new();
    let gt = f.toy_gt();
    let trk = f.write("ex1.txt", &format!("1,1,{A}\n2,1,{B}\n1,2,{B}\n2,2,{A}\n"));
    for solver in ["exact", "lp", "auto"] {
        let out = json(&run(&[
            "evaluate", "--gt", s(&gt), "--trackers", s(&trk), "--c", "0.34", "--p", "1", "--gamma", "0.043", "--solver", solver,
            "--format", "json",
        ]));
        let row = &out["rows"][0];
        assert!((row["total"].as_f64().unwrap() - 0.086).abs() < 1e-9, "{solver}");
        assert_eq!(row["n_switches"], 2.0);
        assert_eq!(row["is_hard"], true);
    }
}

#[test]
fn csv_and_table_layouts() {
    let f = Files::new();
    let gt = f.toy_gt();
    let csv = stdout(&run(&["evaluate", "--gt", s(&gt), "--trackers", s(&gt), "--preset", "online", "--format", "csv"]));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "tracker,total,loc_cost,miss_cost,false_cost,switch_cost,n_proper,n_missed,n_false,n_switches,p_avg_loc,rank,solver,is_hard"
    );
    assert_eq!(lines.next().unwrap(), "gt,0,0,0,0,0,4,0,0,0,0,1,exact,true");
    let table = stdout(&run(&["evaluate", "--gt", s(&gt), "--trackers", s(&gt), "--preset", "detector"]));
    assert!(table.lines().nth(1).unwrap().contains("gamma-zero"));
}

#[test]
fn output_is_deterministic() {
    let f = Files::new();
    let gt = f.toy_gt();
    let a = f.write("a.txt", &format!("1,1,{A}\n2,1,{B}\n1,2,{B}\n2,2,{A}\n"));
    let b = f.write("b.txt", &format!("1,3,{A}\n2,3,{A}\n2,4,{Z}\n"));
    let args = ["evaluate", "--gt", s(&gt), "--trackers", s(&a), s(&b), s(&gt), "--preset", "online", "--format", "json", "--jobs", "3"];
    let first = run(&args).stdout;
    for _ in 0..3 {
        assert_eq!(run(&args).stdout, first);
    }
}

#[test]
fn gamma_subcommand() {
    let out = stdout(&run(&["gamma", "--c", "0.34", "--p", "1", "--n", "10"]));
    assert!(out.starts_with("gamma = 3.4\nh_11 = 0.030909\n"));
    assert_eq!(out.lines().count(), 6);
    let out = stdout(&run(&["gamma", "--c", "0.255", "--p", "1.71", "--g1", "0.2125"]));
    let gamma: f64 = out.trim().strip_prefix("gamma = ").unwrap().parse().unwrap();
    assert!((gamma - 0.079).abs() < 1e-3);
    let out = stdout(&run(&["gamma", "--c", "0.255", "--a", "0.17"]));
    let p: f64 = out.trim().strip_prefix("p = ").unwrap().parse().unwrap();
    assert!((p - 1.71).abs() < 1e-3);
    let out = stdout(&run(&["gamma", "--c", "0.5", "--p", "1.8", "--invert", "0.31"]));
    assert!(out.starts_with("g1 = 0.17"));
}

#[test]
fn hota_subcommand() {
    let f = Files::new();
    let gt = f.toy_gt();
    let empty = f.write("empty.txt", "");
    let ex3 = f.write("ex3.txt", &format!("1,1,{A}\n2,1,{A}\n1,2,{Z}\n2,2,{Z}\n"));
    let out = json(&run(&["hota", "--gt", s(&gt), "--trackers", s(&gt), s(&empty), s(&ex3), "--format", "json"]));
    assert_eq!(out[0]["hota"], 1.0);
    assert_eq!(out[1]["hota"], 0.0);
    assert!((out[2]["hota"].as_f64().unwrap() - 0.577).abs() < 1e-3);
    assert_eq!(out[0]["rank"], 1);
    assert_eq!(out[1]["rank"], 3);
    let csv = stdout(&run(&["hota", "--gt", s(&gt), "--trackers", s(&gt), "--per-alpha", "--format", "csv"]));
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 3 + 19);
}

#[test]
fn compare_ranks_side_by_side() {
    let f = Files::new();
    let gt = f.toy_gt();
    let ex1 = f.write("ex1.txt", &format!("1,1,{A}\n2,1,{B}\n1,2,{B}\n2,2,{A}\n"));
    let ex2 = f.write("ex2.txt", &format!("1,1,{A}\n2,1,{A}\n1,2,{B}\n2,2,{Z}\n"));
    let out = json(&run(&[
        "compare", "--gt", s(&gt), "--trackers", s(&ex1), s(&ex2), "--c", "0.34", "--p", "1", "--gamma", "0.043", "--format", "json",
    ]));
    // TGOSPA prefers the swapped tracks, HOTA the lost object.
    assert_eq!((out[0]["tgospa_rank"].as_u64(), out[0]["hota_rank"].as_u64()), (Some(1), Some(2)));
    assert_eq!((out[1]["tgospa_rank"].as_u64(), out[1]["hota_rank"].as_u64()), (Some(2), Some(1)));
}

#[test]
fn select_params_histogram() {
    let f = Files::new();
    let gt = f.toy_gt();
    let empty = f.write("empty.txt", "");
    let out_path = f.dir.path().join("hist.csv");
    let r = run(&["select-params", "--gt", s(&gt), "--trackers", s(&gt), "--output", s(&out_path), "--bin-width", "0.1"]);
    assert!(r.status.success());
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "bin_center,diff_N,diff_L");
    assert_eq!(lines.len(), 11);
    assert!(lines[1].starts_with("0.05,4,"));
    assert!(lines[2..].iter().all(|l| l.split(',').nth(1) == Some("0")));

    let counts = |args: &[&str]| -> u64 {
        stdout(&run(args))
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
            .sum()
    };
    assert_eq!(counts(&["select-params", "--gt", s(&gt), "--trackers", s(&empty)]), 0);
    assert_eq!(counts(&["select-params", "--gt", s(&gt), "--trackers", s(&gt), s(&gt)]), 8);
}

#[test]
fn window_and_id_filters() {
    let f = Files::new();
    let mut gt = String::new();
    for frame in 370..460 {
        for id in [2, 3, 6] {
            let _ = writeln!(gt, "{frame},{id},{},0,10,10,1,1,1", id * 50);
        }
    }
    let gt = f.write("gt.txt", &gt);
    let empty = f.write("empty.txt", "");
    let out = json(&run(&[
        "evaluate", "--gt", s(&gt), "--trackers", s(&empty), "--window", "382:442", "--ids", "2,6", "--c", "1", "--p", "1",
        "--gamma", "1", "--format", "json",
    ]));
    assert_eq!(out["rows"][0]["n_missed"], 122.0);
}

#[test]
fn exit_codes() {
    let f = Files::new();
    let gt = f.toy_gt();
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["evaluate", "--gt", "/nonexistent/gt.txt", "--trackers", s(&gt), "--preset", "online"]), 2);
    let bad = f.write("bad.txt", "1,1,abc,0,1,1\n");
    let r = run(&["evaluate", "--gt", s(&gt), "--trackers", s(&bad), "--preset", "online"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("line 1"));
    assert_eq!(code(&["evaluate", "--gt", s(&gt), "--trackers", s(&gt), "--c", "-1", "--p", "1", "--gamma", "1"]), 1);
    assert_eq!(code(&["evaluate", "--gt", s(&gt), "--trackers", s(&gt), "--c", "1"]), 1);
    assert_eq!(code(&["evaluate", "--gt", s(&gt)]), 1);
    assert_eq!(code(&["gamma", "--c", "0.34", "--p", "1", "--g1", "0.5"]), 1);
    assert_eq!(
        code(&["evaluate", "--gt", s(&gt), "--trackers", s(&gt), "--preset", "online", "--solver", "exact", "--exact-ceiling", "1"]),
        3
    );
    assert_eq!(code(&["--help"]), 0);
}
