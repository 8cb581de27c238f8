use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ekverify"))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json")).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn ekverify")
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ekverify-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_exact_small_sweep() {
    let out = temp("exact.json");
    let o = run(&["verify-exact", "--max-k", "5", "--max-m", "20", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let checks = v["checks"].as_array().unwrap();
    for name in ["a1", "a2", "b-lemma", "x1"] {
        let rows: Vec<_> = checks.iter().filter(|r| r["check"] == "identity" && r["params"]["name"] == name).collect();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r["pass"] == true));
    }
    let appendix = checks.iter().filter(|r| r["check"] == "appendix").count();
    assert_eq!(appendix, 20);
    let limit = checks.iter().find(|r| r["check"] == "remark_limit").unwrap();
    assert_eq!(limit["value"], "-57/625");
}

#[test]
fn calibrate_projective_line() {
    let out = temp("cal.json");
    let o = run(&["calibrate", "--scenario", &fixture("cp1_square_01"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let vol = v["checks"].as_array().unwrap().iter().find(|r| r["check"] == "volume").unwrap();
    let four_pi = 4.0 * std::f64::consts::PI;
    assert!((vol["lhs"].as_f64().unwrap() - four_pi).abs() <= 1e-8 * four_pi);
    let ke = v["checks"].as_array().unwrap().iter().find(|r| r["check"] == "einstein_residual").unwrap();
    assert!(ke["value"].as_f64().unwrap() <= 1e-8);
    assert!(v["conventions"]["coordinates"].is_string());
}

#[test]
fn theorem1_line_on_projective_plane() {
    let o = run(&["check", "theorem1", "--k", "2", "--scenario", &fixture("cp2_product_02")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("pass") && l.contains("theorem1") && l.contains("k=2") && l.contains("err=")), "{s}");
}

#[test]
fn inconclusive_checks_exit_1() {
    let path = temp("coarse.json");
    std::fs::write(&path, r#"{"manifold":"cp","n":2,"perturbation":{"f":"mu1*mu2","eps":0.5},"grid":{"nodes_per_axis":8}}"#).unwrap();
    let o = run(&["check", "theorem1", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("inconclusive"));
}

#[test]
fn configuration_errors_exit_2() {
    let o = run(&["calibrate", "--scenario", &fixture("cp2_bad_k")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("k_list"));

    let path = temp("extra.json");
    std::fs::write(&path, r#"{"manifold":"cp","n":1,"perturbation":{"f":"mu1","eps":0.1,"scale":2}}"#).unwrap();
    let o = run(&["calibrate", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("perturbation.scale"), "{}", stderr(&o));

    let o = run(&["check", "theorem1", "--k", "3", "--scenario", &fixture("cp2_product_01")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["check", "theorem3", "--scenario", &fixture("cp2_product_01")]);
    assert_eq!(o.status.code(), Some(2), "no field given");
    let o = run(&["check", "pali", "--scenario", &fixture("cp2_product_01"), "--other", &fixture("blowup_product_02")]);
    assert_eq!(o.status.code(), Some(2), "different references");
}

#[test]
fn non_positive_metric_exits_3_naming_node() {
    let o = run(&["calibrate", "--scenario", &fixture("cp2_product_10")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("not positive definite at x = ["), "{}", stderr(&o));
}

#[test]
fn polytope_scenario_matches_builtin_blowup() {
    let a = run(&["check", "theorem3", "--scenario", &fixture("blowup_facets"), "-q", "--out", temp("a.json").to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(temp("a.json")).unwrap()).unwrap();
    let f0 = v["checks"].as_array().unwrap().iter().find(|r| r["check"] == "invariant_over_volume" && r["params"]["k"] == "0").unwrap();
    assert!((f0["value"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn csv_report_is_deterministic_with_one_row_per_check() {
    let scenario = fixture("cp1_square_02");
    let args = ["report", "--scenario", scenario.as_str(), "--format", "csv"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "check");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert!(rows.iter().any(|r| &r[0] == "theorem1"));
    assert!(rows.iter().all(|r| &r[8] == "true"));
}

#[test]
fn compute_dumps_values_per_order() {
    let o = run(&["compute", "--scenario", &fixture("blowup_product_02")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let values = v["values"].as_array().unwrap();
    assert_eq!(values.len(), 3);
    assert_eq!(values[0]["field"], "[1,1]");
    assert!(values[0]["invariant"].as_f64().unwrap() < 0.0);
}
