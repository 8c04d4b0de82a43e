use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperbergman"))
        .args(args)
        .current_dir(dir)
        .env("HYPERBERGMAN_CACHE", dir.join("cache"))
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

/// Data rows of a CSV with a `#` preamble, header excluded.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn systole_of_builtin_groups() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&run(dir.path(), &["systole", "--group", "cyclic-test"]));
    assert_eq!(v["schema_version"], 1);
    assert!((v["result"]["systole"].as_f64().unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
    assert_eq!(v["result"]["certificate"]["certified"], true);

    let v = json(&run(dir.path(), &["systole", "--group", "bolza"]));
    assert!((v["result"]["systole"].as_f64().unwrap() - 3.057_141_838_961_996).abs() < 1e-9);
    assert_eq!(v["result"]["genus"], 2);

    assert_eq!(code(&run(dir.path(), &["systole", "--group", "no-such-group"])), 2);
}

#[test]
fn systole_too_small_radius_is_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["systole", "--group", "bolza", "--radius", "4"])), 4);
}

#[test]
fn bound_by_radius_and_group() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&run(dir.path(), &["bound", "--r", "1e9"]));
    assert!((v["result"]["closed_form_b"].as_f64().unwrap() - 48.0 / std::f64::consts::PI).abs() < 1e-9);

    assert_eq!(code(&run(dir.path(), &["bound", "--r", "0"])), 2);
    assert_eq!(code(&run(dir.path(), &["bound"])), 2);

    let v = json(&run(dir.path(), &["bound", "--group", "bolza"]));
    let res = &v["result"];
    assert_eq!(res["chain_holds"], true);
    let p = res["pointwise_orbit_bound"].as_f64().unwrap();
    let l = res["looser_orbit_bound"].as_f64().unwrap();
    let a = res["orbit_sum_bound"].as_f64().unwrap();
    let b = res["closed_form_b"].as_f64().unwrap();
    assert!(p <= l && l <= a && a <= b);
}

#[test]
fn verify_thm21_margins_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify-thm21", "--level", "23", "--grid", "200", "--out", "a.csv"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert!(text.starts_with("# schema_version=1\n"));
    assert!(text.contains("\nx,y,bergman,bound,margin\n"));
    let rows = csv_rows(&text);
    assert!(rows.len() >= 200);
    assert!(rows.iter().all(|r| num(&r[4]) > 0.0));

    run(dir.path(), &["verify-thm21", "--level", "23", "--grid", "200", "--out", "b.csv", "--jobs", "1"]);
    assert_eq!(text, std::fs::read_to_string(dir.path().join("b.csv")).unwrap());
}

#[test]
fn verify_thm21_rejects_genus_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify-thm21", "--level", "11"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("genus"));
    assert_eq!(code(&run(dir.path(), &["verify-thm21", "--level", "22"])), 2);
}

#[test]
fn verify_thm32_margins_guards_and_probe() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify-thm32", "--level", "23", "--d", "2", "--trials", "200"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| num(&r[5]) > 0.0));

    assert_eq!(code(&run(dir.path(), &["verify-thm32", "--level", "23", "--d", "5", "--path", "perm"])), 2);

    let out = run(dir.path(), &["verify-thm32", "--level", "29", "--d", "2", "--trials", "20", "--duplicate-probe"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert!(rows.iter().all(|r| num(&r[3]) < 1e-10));
}

#[test]
fn verify_thm32_seed_changes_points() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(dir.path(), &["verify-thm32", "--level", "31", "--d", "2", "--trials", "5", "--seed", "3"]).stdout;
    let b = run(dir.path(), &["verify-thm32", "--level", "31", "--d", "2", "--trials", "5", "--seed", "3"]).stdout;
    let c = run(dir.path(), &["verify-thm32", "--level", "31", "--d", "2", "--trials", "5", "--seed", "4"]).stdout;
    assert_eq!(a, b);
    assert_ne!(csv_rows(&String::from_utf8(a).unwrap()), csv_rows(&String::from_utf8(c).unwrap()));
}

#[test]
fn sweep_family_bound_and_cache_temperature() {
    let dir = tempfile::tempdir().unwrap();
    let cold = run(dir.path(), &["sweep"]);
    assert_eq!(code(&cold), 0);
    assert!(dir.path().join("cache/level23").is_dir());
    let warm = run(dir.path(), &["sweep"]);
    assert_eq!(cold.stdout, warm.stdout);

    let rows = csv_rows(&String::from_utf8(cold.stdout).unwrap());
    assert_eq!(rows.len(), 5);
    let family = rows.last().unwrap();
    assert_eq!(family[0], "family");
    let min_sys = rows[..4].iter().map(|r| num(&r[2])).fold(f64::INFINITY, f64::min);
    let max_bound = rows[..4].iter().map(|r| num(&r[3])).fold(0.0, f64::max);
    assert_eq!(num(&family[2]), min_sys);
    assert_eq!(num(&family[3]), max_bound);
}

#[test]
fn sweep_rejects_empty_level_list() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"levels": []}"#).unwrap();
    assert_eq!(code(&run(dir.path(), &["sweep", "--config", "cfg.json"])), 2);
}

#[test]
fn config_file_is_overridden_by_flags_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"seed": 9, "trials": 3}"#).unwrap();
    let out = run(dir.path(), &["verify-thm32", "--config", "cfg.json", "--level", "23", "--d", "2", "--seed", "11"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg_line = text.lines().find(|l| l.starts_with("# config=")).unwrap();
    let cfg: Value = serde_json::from_str(&cfg_line["# config=".len()..]).unwrap();
    assert_eq!(cfg["seed"], 11);
    assert_eq!(cfg["trials"], 3);
    assert_eq!(csv_rows(&text).len(), 3);

    std::fs::write(dir.path().join("bad.json"), r#"{"sede": 9}"#).unwrap();
    assert_eq!(code(&run(dir.path(), &["sweep", "--config", "bad.json"])), 2);
    assert_eq!(code(&run(dir.path(), &["sweep", "--jobs", "0"])), 2);
}

#[test]
fn fetch_writes_an_auditable_cache() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&run(dir.path(), &["fetch", "--level", "23,37"]));
    let res = v["result"].as_array().unwrap();
    assert_eq!(res.len(), 2);
    for level in res {
        assert_eq!(level["embeddings"].as_array().unwrap().len(), 2);
        assert!(level["audit"]["violations"].as_array().unwrap().is_empty());
        assert!(level["min_terms"].as_u64().unwrap() >= 500);
    }
    let files: Vec<_> = std::fs::read_dir(dir.path().join("cache/level37")).unwrap().collect();
    assert_eq!(files.len(), 2);

    assert_eq!(code(&run(dir.path(), &["fetch", "--level", "21"])), 2);
    assert_eq!(code(&run(dir.path(), &["fetch", "--level", "41"])), 3);
}
