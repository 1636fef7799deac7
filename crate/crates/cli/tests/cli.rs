use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bistable"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bistable-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn assert_error_line(out: &Output, code: i32, error: &str) {
    assert_eq!(out.status.code(), Some(code));
    assert!(out.stdout.is_empty());
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.trim_end().lines().count(), 1, "{text}");
    let v: Value = serde_json::from_str(text.trim_end()).unwrap();
    assert_eq!(v["error"], error);
    assert!(v["message"].is_string());
}

#[test]
fn empty_csv_exits_two() {
    let p = write("empty.csv", "");
    let out = run(&["build", path(&p)]);
    assert_error_line(&out, 2, "EmptyInput");
    let v: Value = serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(v["message"], "empty input");
}

#[test]
fn usage_and_io_errors_are_json() {
    assert_error_line(&run(&["frobnicate"]), 2, "Usage");
    assert_error_line(&run(&["build", "/nonexistent/points.csv"]), 2, "Io");
    assert_error_line(&run(&["hilbert", "x.csv", "--grid", "3by3"]), 2, "Usage");
    let p = write("bad.csv", "0,0\n1,x\n");
    assert_error_line(&run(&["build", path(&p)]), 2, "Parse");
    let tri = write("tri-err.csv", "0,0\n1,0\n0,1\n");
    assert_error_line(&run(&["build", path(&tri), "--mode", "kfold-cech"]), 1, "InvalidInput");
    assert_error_line(&run(&["tightness", "warmup", "--c", "3.5"]), 1, "ParameterOutOfWindow");
}

#[test]
fn help_goes_to_stdout() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("experiment"));
}

/// Minimal grades of the open degree-Rips bifiltration, enumerated by hand:
/// above a critical radius `c` a vertex has every point within `2c` as a
/// neighbor, and a simplex has the least degree among its vertices.
fn hand_grades(points: &[[f64; 2]], simplex: &[usize]) -> Vec<(f64, f64)> {
    let n = points.len();
    let d = |a: usize, b: usize| ((points[a][0] - points[b][0]).powi(2) + (points[a][1] - points[b][1]).powi(2)).sqrt();
    let mut radii = vec![0.0];
    for a in 0..n {
        for b in a + 1..n {
            radii.push(d(a, b) / 2.0);
        }
    }
    let entry = simplex.iter().flat_map(|&a| simplex.iter().map(move |&b| (a, b))).map(|(a, b)| d(a, b) / 2.0).fold(0.0, f64::max);
    let mut grades = Vec::new();
    for &c in radii.iter().filter(|&&c| c >= entry) {
        let degree = |v: usize| (0..n).filter(|&u| d(u, v) / 2.0 <= c).count();
        let k = simplex.iter().map(|&v| degree(v)).min().unwrap() as f64 / n as f64;
        grades.push((k, c));
    }
    // keep the minimal ones in J: nothing with k' ≥ k and r' ≤ r
    let mut minimal: Vec<(f64, f64)> = grades
        .iter()
        .copied()
        .filter(|&(k, r)| !grades.iter().any(|&(k2, r2)| k2 >= k && r2 <= r && (k2, r2) != (k, r)))
        .collect();
    minimal.sort_by(|a, b| a.partial_cmp(b).unwrap());
    minimal.dedup();
    minimal
}

#[test]
fn three_point_build_matches_hand_enumeration() {
    let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let p = write("tri.csv", "x,y\n0,0\n1,0\n0,1\n");
    let out = run(&["build", path(&p), "--mode", "degree-rips", "--maxdim", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["schema"], "bistable/1");
    assert_eq!(v["n_vertices"], 3);
    let simplices = v["simplices"].as_array().unwrap();
    let by_dim = |d: usize| simplices.iter().filter(|s| s["verts"].as_array().unwrap().len() == d + 1).count();
    assert_eq!((by_dim(0), by_dim(1), simplices.len()), (3, 3, 6));
    for s in simplices {
        let verts: Vec<usize> = s["verts"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect();
        let mut got: Vec<(f64, f64)> =
            s["grades"].as_array().unwrap().iter().map(|g| (g[0].as_f64().unwrap(), g[1].as_f64().unwrap())).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = hand_grades(&pts, &verts);
        assert_eq!(got.len(), want.len(), "{verts:?}: {got:?} vs {want:?}");
        for (g, w) in got.iter().zip(&want) {
            assert!((g.0 - w.0).abs() < 1e-12 && (g.1 - w.1).abs() < 1e-12, "{verts:?}: {got:?} vs {want:?}");
        }
    }
    // progress goes to stderr, never stdout
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"simplices\":6"));
}

#[test]
fn out_flag_writes_file_only() {
    let p = write("tri-out.csv", "0,0\n1,0\n0,1\n");
    let target = scratch("tri-out.json");
    let out = run(&["build", path(&p), "--maxdim", "1", "--out", path(&target)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["simplices"].as_array().unwrap().len(), 6);
}

#[test]
fn built_json_feeds_module_commands() {
    let p = write("square.csv", "0,0\n1,0\n1,1\n0,1\n");
    let json = scratch("square.json");
    let flag = scratch("square-flag.json");
    assert!(run(&["build", path(&p), "--maxdim", "2", "--out", path(&json)]).status.success());
    assert!(run(&["build", path(&p), "--mode", "degree-rips-flag", "--out", path(&flag)]).status.success());
    let grid = ["--grid", "6x8", "--r-max", "0.8", "--degree", "1"];
    let from_csv = stdout_json(&run(&[&["hilbert", path(&p)][..], &grid].concat()));
    let from_json = stdout_json(&run(&[&["hilbert", path(&json)][..], &grid].concat()));
    let from_flag = stdout_json(&run(&[&["hilbert", path(&flag)][..], &grid].concat()));
    assert_eq!(from_csv, from_json);
    assert_eq!(from_csv, from_flag);
    // each corner sees three of four points while the hole is open, so it
    // shows at k = 4/6 but not in the rows above
    let dims = from_csv["dims"].as_array().unwrap();
    let has_hole = |row: usize| dims[row].as_array().unwrap().iter().any(|d| d == 1);
    assert!(!has_hole(0) && !has_hole(1) && has_hole(2));
    let betti = stdout_json(&run(&[&["betti", path(&json)][..], &grid].concat()));
    assert_eq!(betti["degree"], 1);
}

#[test]
fn barcode_through_two_points() {
    let p = write("square-bar.csv", "0,0\n1,0\n1,1\n0,1\n");
    let v = stdout_json(&run(&["barcode", path(&p), "--degree", "1", "--through", "0.25,0,0.25,1"]));
    // H1 of the 1-parameter Rips filtration: born at half the side, dies at half the diagonal
    let bars = v["bars"].as_array().unwrap();
    assert_eq!(bars.len(), 1);
    assert!((bars[0][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((bars[0][1].as_f64().unwrap() - 2f64.sqrt() / 2.0).abs() < 1e-12);
    let flipped = stdout_json(&run(&["barcode", path(&p), "--degree", "1", "--through", "0.25,1,0.25,0"]));
    assert_eq!(v, flipped);
    let out = run(&["barcode", path(&p), "--through", "0.2,0,0.5,1"]);
    assert_error_line(&out, 1, "NonMonotoneLine");
}

#[test]
fn measures_commands() {
    let pts = write("line.csv", "0\n1\n3\n");
    let mu = write("mu.json", r#"{"atoms":[0,1],"weights":[0.5,0.5]}"#);
    let eta = write("eta.json", r#"{"atoms":[1,2],"weights":[0.5,0.5]}"#);
    let flow = stdout_json(&run(&["prohorov", path(&pts), path(&mu), path(&eta)]));
    let brute = stdout_json(&run(&["prohorov", path(&pts), path(&mu), path(&eta), "--method", "brute"]));
    assert_eq!(brute["d_pr"], 0.5);
    assert!((flow["d_pr"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    let w = stdout_json(&run(&["wasserstein", path(&pts), path(&mu), path(&eta)]));
    // every coupling of these two measures on a line costs 1/2·1 + 1/2·2
    assert!((w["d_w"].as_f64().unwrap() - 1.5).abs() < 1e-9);
    assert_eq!(w["bounds"]["pass"], true);
    let empty = write("none.json", r#"{"atoms":[],"weights":[]}"#);
    assert_error_line(&run(&["prohorov", path(&pts), path(&empty), path(&eta)]), 2, "EmptyInput");
}

#[test]
fn seeded_output_is_byte_identical() {
    let args = ["--seed", "7", "experiment", "consistency", "--sizes", "25,50"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);
    let other = run(&["--seed", "8", "experiment", "consistency", "--sizes", "25,50"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn nerve_check_single_points() {
    let v = stdout_json(&run(&["nerve-check", "--clouds", "2", "--n-min", "1", "--n-max", "1"]));
    assert_eq!(v["mismatches"], 0);
    assert!(v.get("seconds").is_none());
    assert!(v["checked"].as_u64().unwrap() > 0);
}

#[test]
fn tightness_and_discontinuity_run() {
    let w = stdout_json(&run(&["tightness", "warmup", "--c", "1.5"]));
    assert_eq!(w["schema"], "bistable/1");
    assert_eq!(w["d_pr"], 0.25);
    let d = stdout_json(&run(&["experiment", "discontinuity", "--n-max", "6"]));
    assert_eq!(d["schema"], "bistable/1");
}

#[test]
fn audit_on_tiny_clouds() {
    let x = write("ax.csv", "0,0\n1,0\n1,1\n0,1\n");
    let y = write("ay.csv", "0,0\n1,0\n1,1\n0,1\n0.5,0.5\n");
    let v = stdout_json(&run(&["audit", path(&x), path(&y), "--mode", "nested", "--grid", "6x6", "--degree", "0"]));
    assert_eq!(v["schema"], "bistable/1");
    assert_eq!(v["consistent"], true);
}
