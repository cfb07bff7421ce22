use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn catsp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catsp"))
        .current_dir(dir)
        .env_remove("CATSP_SEED")
        .args(args)
        .output()
        .expect("spawn catsp")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = catsp(dir, args);
    assert!(
        out.status.success(),
        "catsp {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn generated(count: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["gen", "--seed", "3", "--count", count, "--zones", "4", "--stops-per-zone", "3", "--out", "gen"],
    );
    dir
}

#[test]
fn gen_writes_instance_history_and_route_files() {
    let dir = generated("2");
    for id in ["syn-3", "syn-4"] {
        let inst = json(&dir.path().join(format!("gen/{id}.instance.json")));
        assert_eq!(inst["id"], id);
        assert!(inst["stops"].as_array().unwrap().len() > 1);
        let hist = json(&dir.path().join(format!("gen/{id}.histories.json")));
        assert!(!hist.as_array().unwrap().is_empty());
        let route = json(&dir.path().join(format!("gen/{id}.route.json")));
        let order = route["order"].as_array().unwrap();
        assert_eq!(order.first(), order.last());
    }
    let manifest = json(&dir.path().join("gen/manifest.json"));
    assert_eq!(manifest["seeds"], serde_json::json!([3, 4]));
}

#[test]
fn mine_is_byte_stable() {
    let dir = generated("2");
    ok(dir.path(), &["mine", "--histories", "gen/*.histories.json", "--out", "a.json"]);
    ok(dir.path(), &["mine", "--histories", "gen/*.histories.json", "--out", "b.json"]);
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = catsp(dir.path(), &["solve", "--instances", "absent.json", "--mode", "base", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));
}

#[test]
fn unknown_policy_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = catsp(dir.path(), &["gen", "--policy", "zigzag", "--out", "g"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dm_without_history_exits_2() {
    let dir = generated("1");
    let out = catsp(dir.path(), &["solve", "--instances", "gen/syn-3.instance.json", "--mode", "dm", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_instance_single_mode_gives_one_row() {
    let dir = generated("1");
    ok(
        dir.path(),
        &["solve", "--instances", "gen/syn-3.instance.json", "--mode", "visual:nc", "--iters", "5", "--out", "o"],
    );
    let mut rdr = csv::Reader::from_path(dir.path().join("o/results.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "syn-3");
    assert_eq!(&rows[0][1], "visual:nc");
    let planned = json(&dir.path().join("o/routes/syn-3.visual-nc.json"));
    assert_eq!(planned["order"][0], "DEPOT");
}

#[test]
fn weights_override_is_recorded_and_used() {
    let dir = generated("2");
    ok(dir.path(), &["mine", "--histories", "gen/*.histories.json", "--out", "field.json"]);
    let base = ["solve", "--instances", "gen/*.instance.json", "--field", "field.json", "--mode", "dm", "--iters", "5"];
    ok(dir.path(), &[&base[..], &["--weights", "3,1,1,5", "--out", "r"]].concat());
    let manifest = json(&dir.path().join("r/manifest.json"));
    let recorded = manifest["invocation"]["command"]["search"]["weights"].as_str().unwrap();
    let parsed: Vec<f64> = recorded.split(',').map(|v| v.trim().parse().unwrap()).collect();
    assert_eq!(parsed, vec![3.0, 1.0, 1.0, 5.0]);

    // Dropping every history term changes the dm plans.
    ok(dir.path(), &[&base[..], &["--out", "d"]].concat());
    ok(dir.path(), &[&base[..], &["--weights", "1,0,0,0", "--out", "t"]].concat());
    let d = std::fs::read_to_string(dir.path().join("d/results.csv")).unwrap();
    let t = std::fs::read_to_string(dir.path().join("t/results.csv")).unwrap();
    assert_ne!(d, t);
}

#[test]
fn pareto_summary_has_histogram_and_gaps() {
    let dir = generated("1");
    ok(dir.path(), &["mine", "--histories", "gen/*.histories.json", "--out", "field.json"]);
    ok(
        dir.path(),
        &[
            "pareto", "--instances", "gen/*.instance.json", "--field", "field.json", "--runs", "2", "--n-max", "5",
            "--iters", "5", "--out", "p",
        ],
    );
    let summary = json(&dir.path().join("p/pareto_summary.json"));
    assert_eq!(summary["runs"], 2);
    let sizes = summary["sizes"].as_object().unwrap();
    let keys: Vec<&str> = sizes.keys().map(String::as_str).collect();
    for k in ["1", "2", "3", "4", "5+"] {
        assert!(keys.contains(&k), "missing bucket {k}");
    }
    assert_eq!(sizes.values().map(|v| v.as_u64().unwrap()).sum::<u64>(), 2);
    assert!(summary["gap"]["instances_over_minutes"]["60"].is_u64());
    assert!(dir.path().join("p/fronts/syn-3.s1.svg").exists());
}

#[test]
fn score_prints_report_json() {
    let dir = generated("1");
    let out = ok(
        dir.path(),
        &[
            "score", "--instance", "gen/syn-3.instance.json", "--route", "gen/syn-3.route.json", "--reference",
            "gen/syn-3.route.json",
        ],
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["score"], 0.0);
    assert_eq!(report["erp_e"], 0);
}
