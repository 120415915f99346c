use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use treedim::dimension::{parse_levels_csv, parse_report_json, CSV_COLUMNS};
use treedim::tree::Degree;

fn treedim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treedim"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env_remove("TREEDIM_POINT_BUDGET")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&treedim(&["--help"])), 0);
    assert_eq!(code(&treedim(&["dim", "--help"])), 0);
}

#[test]
fn dim_bsv3_reports_closed_form() {
    let out = treedim(&["dim", "--group", "bsv", "--m", "3", "--max-level", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["closed_form"]["rational"], "3/4");
    assert_eq!(v["closed_form"]["float"], 0.75);
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 4);
    let s: Vec<&str> = levels.iter().filter_map(|l| l["s_n"].as_str()).collect();
    assert_eq!(s, ["log3(3^-2)", "log3(1)", "log3(3^-2)"]);
}

#[test]
fn dim_single_level_is_not_a_failure() {
    let out = treedim(&["dim", "--group", "bsv", "--m", "2", "--max-level", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["levels"].as_array().unwrap().len(), 1);
}

#[test]
fn adding_machine_ratios() {
    let out = treedim(&["dim", "--group", "file:automata/adder.json", "--m", "2", "--max-level", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    for l in v["levels"].as_array().unwrap() {
        let n = l["n"].as_u64().unwrap() as i32;
        assert_eq!(l["index"], (1u64 << n).to_string());
        let expect = n as f64 / (2f64.powi(n) - 1.0);
        assert!((l["ratio"].as_f64().unwrap() - expect).abs() < 1e-11);
    }
    assert!(v.get("closed_form").is_none());
}

#[test]
fn grigorchuk_series_reaches_five_eighths() {
    // level orders 2^(5·2^(n−3)+2) for n ≥ 3 give s_3 = 3 and s_n = 0 beyond
    let out = treedim(&["dim", "--group", "file:automata/grigorchuk.json", "--max-level", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let idx: Vec<&str> = v["levels"].as_array().unwrap().iter().map(|l| l["index"].as_str().unwrap()).collect();
    assert_eq!(idx, ["2", "8", "128", "4096", "4194304"]);
    assert_eq!(v["levels"][3]["partial_dim"], 0.625);
}

#[test]
fn csv_has_the_documented_columns_and_parses_back() {
    let out = treedim(&["dim", "--m", "2", "--max-level", "4", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    let rows = parse_levels_csv(&text, Degree::new(2).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
    let json_out = treedim(&["dim", "--m", "2", "--max-level", "4"]);
    let report = parse_report_json(std::str::from_utf8(&json_out.stdout).unwrap()).unwrap();
    assert_eq!(report.levels, rows);
}

#[test]
fn output_is_deterministic_and_out_writes_a_file() {
    let a = treedim(&["verify", "--m", "3", "--which", "all", "--max-level", "3"]);
    let b = treedim(&["verify", "--m", "3", "--which", "all", "--max-level", "3"]);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let path: PathBuf = dir.path().join("r.json");
    let c = treedim(&["dim", "--m", "3", "--max-level", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&c), 0);
    assert!(c.stdout.is_empty());
    let d = treedim(&["dim", "--m", "3", "--max-level", "3"]);
    assert_eq!(std::fs::read(&path).unwrap(), d.stdout);
}

#[test]
fn verify_all_passes_for_m3() {
    let out = treedim(&["verify", "--m", "3", "--which", "all", "--max-level", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let recs = json(&out);
    let recs = recs.as_array().unwrap();
    assert!(recs.iter().all(|r| r["pass"] != false));
    for family in ["P1", "lemma32.ell", "prop35", "structure", "matrixA"] {
        assert!(recs.iter().any(|r| r["check"].as_str().unwrap().starts_with(family)), "{family}");
    }
}

#[test]
fn verify_prop34_m2_skips_p_and_r() {
    let out = treedim(&["verify", "--m", "2", "--which", "prop34", "--kmax", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for r in json(&out).as_array().unwrap() {
        let check = r["check"].as_str().unwrap();
        if check.starts_with('Q') {
            assert_eq!(r["pass"], true, "{r}");
        } else {
            assert!(r["pass"].is_null(), "{r}");
        }
    }
}

#[test]
fn verify_lemma32_m4_ell_values() {
    let out = treedim(&["verify", "--m", "4", "--which", "lemma32", "--max-level", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let ells: Vec<String> = json(&out)
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["check"] == "lemma32.ell")
        .map(|r| r["actual"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(ells, ["2", "4"]);
}

#[test]
fn order_examples() {
    let out = treedim(&["order", "--m", "3", "--element", "a b", "--level", "2"]);
    assert_eq!(json(&out)["order_mod_derived"], "3");
    let out = treedim(&["order", "--m", "2", "--element", "e", "--level", "3"]);
    assert_eq!(json(&out)["order"], "1");
    let out = treedim(&["order", "--m", "4", "--element", "a b", "--level", "1", "--format", "csv"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "element,level,order,order_mod_derived\na b,1,2,2\n"
    );
}

#[test]
fn exit_codes_for_errors() {
    let out = treedim(&["order", "--m", "3", "--element", "a q", "--level", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains('q'));
    assert_eq!(code(&treedim(&["dim", "--m", "5", "--point-budget", "4"])), 3);
    assert_eq!(code(&treedim(&["verify", "--group", "file:automata/adder.json"])), 2);
    assert_eq!(code(&treedim(&["dim", "--group", "file:automata/hanoi3.json", "--max-level", "2"])), 2);
    assert_eq!(code(&treedim(&["dim", "--group", "file:missing.json"])), 2);
    assert_eq!(code(&treedim(&["dim", "--m", "1"])), 2);
    assert_eq!(code(&treedim(&["dim", "--m", "2", "--format", "xml"])), 2);
}

#[test]
fn malformed_automaton_names_the_offending_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"alphabet_size": 2, "states": [{"name": "s", "output": [1, 1], "transitions": ["e", "s"]}]}"#,
    )
    .unwrap();
    let group = format!("file:{}", path.display());
    let out = treedim(&["dim", "--group", &group]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("`s`") || err.contains("\"s\"") || err.contains(" s "), "{err}");
    assert!(err.contains("output"), "{err}");
}

#[test]
fn budget_truncates_with_a_skipped_marker() {
    let out = treedim(&["dim", "--m", "3", "--max-level", "6", "--point-budget", "100"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["skipped"]["from_level"], 5);
    assert!(stderr(&out).contains("skipped"));
}

#[test]
fn budget_can_come_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_treedim"))
        .args(["dim", "--m", "3", "--max-level", "6"])
        .env("TREEDIM_POINT_BUDGET", "30")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["skipped"]["from_level"], 4);
}
