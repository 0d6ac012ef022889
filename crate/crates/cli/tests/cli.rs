use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use minset::io::write_dataset;
use minset::{synthetic_kb_with, SyntheticShape};
use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn minset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minset"))
        .args(args)
        .env("MINSET_LOG", "info")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = minset(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn names(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

#[test]
fn select_on_the_injected_matrix() {
    let table1 = fixture("table1.csv");
    let r = ok_json(&["select", "--matrix", path(&table1), "--trace"]);
    assert_eq!(names(&r["selected"]), ["y_1", "y_3", "y_4"]);
    assert!((r["dp_selected"].as_f64().unwrap() - 3.6).abs() < 1e-9);
    assert!(r["elapsed_ms"].as_f64().unwrap() >= 0.0);
    let steps: Vec<&str> = r["trace"].as_array().unwrap().iter().map(|s| s["action"].as_str().unwrap()).collect();
    assert_eq!(steps, ["indispensable", "indispensable", "select"]);
    let narrative = names(&r["narrative"]);
    assert!(narrative.iter().any(|l| l.contains("select y_4") && l.contains("DP = 3.6")), "{narrative:?}");

    let plain = ok_json(&["select", "--matrix", path(&table1)]);
    assert!(plain.get("trace").is_none() && plain.get("narrative").is_none());
}

#[test]
fn boolean_minset_on_the_injected_matrix_is_degenerate() {
    let out = minset(&["select", "--matrix", path(&fixture("table1.csv")), "--algorithm", "minset"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["degenerate"], Value::Bool(true));
    assert!(names(&r["selected"]).is_empty());
}

#[test]
fn select_on_objects_with_each_algorithm() {
    let input = fixture("example3.json");
    for alg in ["minset", "minset-plus", "minset-partial"] {
        let r = ok_json(&["select", "--input", path(&input), "--algorithm", alg]);
        assert_eq!(names(&r["selected"]), ["height", "hair"], "{alg}");
        assert_eq!(r["dp_total"].as_f64(), Some(3.0), "{alg}");
    }
    let r = ok_json(&["select", "--input", path(&input), "--gamma", "0.25"]);
    assert_eq!(r["measure"]["name"], "ichino_yaguchi");
}

#[test]
fn dumped_matrix_reloads_to_the_same_selection() {
    let dir = TempDir::new().unwrap();
    let dump = dir.path().join("m.csv");
    let input = fixture("example3.json");
    let a = ok_json(&["select", "--input", path(&input), "--dump-matrix", path(&dump)]);
    let b = ok_json(&["select", "--matrix", path(&dump)]);
    assert_eq!(a["selected"], b["selected"]);
    assert_eq!(a["dp_selected"], b["dp_selected"]);
}

#[test]
fn usage_and_data_errors() {
    let input = fixture("example3.json");
    assert_eq!(minset(&["select", "--input", path(&input), "--algorithm", "bogus"]).status.code(), Some(1));
    assert_eq!(minset(&["select", "--input", path(&input), "--measure", "cosine"]).status.code(), Some(1));
    assert_eq!(minset(&["select", "--input", path(&input), "--theta", "0"]).status.code(), Some(1));
    assert_eq!(minset(&["select"]).status.code(), Some(1));
    assert_eq!(minset(&["--help"]).status.code(), Some(0));
    assert_eq!(minset(&["--version"]).status.code(), Some(0));

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    let text = r#"{
        "variables": [{"name": "height", "type": "categorical", "domain": ["tall", "medium", "small"]}],
        "objects": [
            {"name": "a_1", "values": {"height": ["tall"]}},
            {"name": "a_2", "values": {"height": ["tall", 7]}}
        ]
    }"#;
    fs::write(&bad, text).unwrap();
    let out = minset(&["select", "--input", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("objects[1].values.height[1]"), "{err}");

    fs::write(&bad, "{\"variables\": [").unwrap();
    assert_eq!(minset(&["select", "--input", path(&bad)]).status.code(), Some(2));
    assert_eq!(minset(&["select", "--input", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn gen_so_heights() {
    let csv = fixture("heights.csv");
    let kinds = fixture("heights_kinds.json");
    let refined = ok_json(&["gen-so", "--individuals", path(&csv), "--kinds", path(&kinds), "--refine"]);
    assert_eq!(refined["objects"][0]["name"], "extreme");
    assert_eq!(refined["objects"][0]["values"]["height"], serde_json::json!([[150.0, 165.0], [170.0, 190.0]]));
    assert_eq!(refined["metadata"]["refine"], Value::Bool(true));

    let plain = ok_json(&["gen-so", "--individuals", path(&csv), "--kinds", path(&kinds)]);
    assert_eq!(plain["objects"][0]["values"]["height"], serde_json::json!([[150.0, 190.0]]));
    assert_eq!(plain["objects"][1]["values"]["height"], serde_json::json!([[165.0, 170.0]]));
}

#[test]
fn gen_so_imputes_missing_cells() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("gaps.csv");
    fs::write(&csv, "height,eyes,cluster\n150,blue,a\n,blue,a\n170,,b\n190,green,b\n").unwrap();
    let kinds = dir.path().join("kinds.json");
    fs::write(
        &kinds,
        r#"{"variables": [{"name": "height", "type": "numeric"}, {"name": "eyes", "type": "categorical"}]}"#,
    )
    .unwrap();
    let out = minset(&["gen-so", "--individuals", path(&csv), "--kinds", path(&kinds)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("imputed 2 missing values"));
    let kb: Value = serde_json::from_slice(&out.stdout).unwrap();
    // the missing height becomes the column mean, 170
    assert_eq!(kb["objects"][0]["values"]["height"], serde_json::json!([[150.0, 170.0]]));
}

#[test]
fn gen_ind_is_seeded_and_respects_objects() {
    let dir = TempDir::new().unwrap();
    let objects = fixture("example3.json");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = minset(&["gen-ind", "--objects", path(&objects), "--count", "5", "--seed", "9", "-o", path(out)]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    // without overlap each individual lies in its own object's extent
    let q = ok_json(&["quality", "--objects", path(&objects), "--individuals", path(&a)]);
    let header = fs::read_to_string(&a).unwrap();
    let rows: Vec<&str> = header.lines().skip(1).collect();
    for ext in q["extents"].as_array().unwrap() {
        let object = ext["object"].as_str().unwrap();
        let own = rows.iter().enumerate().filter(|(_, r)| r.ends_with(&format!(",{object}"))).map(|(i, _)| format!("w{}", i + 1));
        let members = names(&ext["members"]);
        for label in own {
            assert!(members.contains(&label), "{label} outside {object}");
        }
    }
}

#[test]
fn heavy_overlap_shows_in_regenerated_objects() {
    let dir = TempDir::new().unwrap();
    let objects = dir.path().join("kb.json");
    let kb = synthetic_kb_with(&SyntheticShape::mixed(10, 20), 5).unwrap();
    write_dataset(fs::File::create(&objects).unwrap(), &kb, None).unwrap();
    let individuals = dir.path().join("ind.csv");
    let o = minset(&[
        "gen-ind", "--objects", path(&objects), "--count", "60", "--overlap", "0.16", "--seed", "2", "-o", path(&individuals),
    ]);
    assert!(o.status.success());
    let kinds = dir.path().join("kinds.json");
    let vars: Vec<Value> = kb
        .variables()
        .iter()
        .map(|v| serde_json::json!({"name": v.name, "type": v.kind().to_string()}))
        .collect();
    fs::write(&kinds, serde_json::json!({ "variables": vars }).to_string()).unwrap();
    let regenerated = dir.path().join("regen.json");
    let o = minset(&["gen-so", "--individuals", path(&individuals), "--kinds", path(&kinds), "-o", path(&regenerated)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let q = ok_json(&["quality", "--objects", path(&regenerated), "--individuals", path(&individuals)]);
    assert!(q["overlap_pct"].as_f64().unwrap() > 0.0, "{}", q["overlap_pct"]);
}

#[test]
fn quality_on_the_small_population() {
    let objects = fixture("example2.json");
    let individuals = fixture("example2_individuals.csv");
    let q = ok_json(&["quality", "--objects", path(&objects), "--individuals", path(&individuals)]);
    assert_eq!(q["extents"][0]["object"], "a");
    assert_eq!(names(&q["extents"][0]["members"]), ["Alain", "Sam"]);
    assert!((q["extent_discrimination_pct"].as_f64().unwrap() - 0.5).abs() < 1e-9);

    let dir = TempDir::new().unwrap();
    let report = dir.path().join("sel.json");
    let o = minset(&["select", "--input", path(&objects), "-o", path(&report)]);
    assert!(o.status.success());
    let q = ok_json(&["quality", "--objects", path(&objects), "--individuals", path(&individuals), "--selection", path(&report)]);
    for key in ["extent_intersection_avg", "original_extent_intersection_avg", "extent_delta"] {
        assert!(q[key].is_number(), "{key}");
    }
    let delta = (q["extent_intersection_avg"].as_f64().unwrap() - q["original_extent_intersection_avg"].as_f64().unwrap()).abs();
    assert!((q["extent_delta"].as_f64().unwrap() - delta).abs() < 1e-12);

    let out = minset(&["quality", "--objects", path(&objects), "--individuals", path(&individuals), "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("overlap_pct,extent_discrimination_pct,"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn quality_rejects_mismatched_variables() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("ind.csv");
    fs::write(&csv, "eyes,height,cluster\nblue,tall,a\n").unwrap();
    let out = minset(&["quality", "--objects", path(&fixture("example2.json")), "--individuals", path(&csv)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_emits_one_row_per_algorithm_and_size() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = minset(&["bench", "--sizes", "4,8,12", "--individuals", "48", "--repeats", "1", "-o", path(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(out).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "size,algorithm,milliseconds,dp_selected,n_selected");
    assert_eq!(lines.len(), 1 + 3 * 3);
    // identical apart from the timing column
    let strip = |s: &str| -> Vec<String> {
        s.lines().map(|l| l.split(',').enumerate().filter(|(i, _)| *i != 2).map(|(_, c)| c).collect::<Vec<_>>().join(",")).collect()
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(minset(&["bench", "--sizes", "8,4"]).status.code(), Some(2));
}

#[test]
fn sweep_emits_one_row_per_seed_and_overlap() {
    let out = minset(&["sweep", "--overlaps", "0.001,0.16", "--seeds", "2", "--objects", "6", "--per-cluster", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2);
    assert!(text.starts_with("seed,overlap_target,achieved_overlap,"));
}
