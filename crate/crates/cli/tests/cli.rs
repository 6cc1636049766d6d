use std::process::{Command, Output};

use serde_json::Value;

fn ratquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratquad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(out)).expect("valid JSON")
}

fn num(v: &Value) -> f64 {
    v.to_string().parse().expect("numeric")
}

/// Cell of a table CSV, looked up by its leading key columns.
fn cell(csv: &str, key: &[&str], column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == column).unwrap();
    lines
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|f| f[..key.len()] == *key)
        .map(|f| f[col].to_string())
        .unwrap_or_else(|| panic!("no row {key:?} in\n{csv}"))
}

#[test]
fn legendre_two_points() {
    let v = json(&ratquad(&["rule", "--kind", "gl", "--n", "2"]));
    let r = 1.0 / 3f64.sqrt();
    let nodes: Vec<f64> = v["nodes"].as_array().unwrap().iter().map(num).collect();
    let weights: Vec<f64> = v["weights"].as_array().unwrap().iter().map(num).collect();
    assert!((nodes[0] + r).abs() < 1e-15 && (nodes[1] - r).abs() < 1e-15);
    assert!(weights.iter().all(|w| (w - 1.0).abs() < 1e-15));
}

#[test]
fn rule_json_schema() {
    let v = json(&ratquad(&["rule", "--kind", "gr", "--n", "3", "--params", "sqrt", "--prec", "128"]));
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["kind", "n", "nodes", "params", "residuals", "weights"]);
    assert_eq!(v["kind"], "gr");
    assert_eq!(v["n"], 3);
    assert_eq!(v["params"].as_array().unwrap().len(), 6);
    assert_eq!(v["params"][0]["mult"], 1);
    assert_eq!(v["residuals"]["per_k"].as_array().unwrap().len(), 6);
    assert!(num(&v["residuals"]["max"]) < 1e-18);
}

#[test]
fn gaussian_block_in_table1_layout() {
    let out = ratquad(&["rule", "--kind", "gr", "--n", "6", "--params", "sqrt", "--format", "csv", "--table1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,node,weight"));
    assert_eq!(lines.next(), Some("1,-0.9797390942708352,0.0528758827013522"));
    assert_eq!(lines.last(), Some("6,0.8155273184304977,0.4432078026811501"));
}

#[test]
fn table1_has_both_blocks() {
    let out = ratquad(&["table", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(cell(&text, &["1"], "or_node"), "-0.9736320979338328");
    assert_eq!(cell(&text, &["6"], "or_weight"), "0.3717581082177663");
    assert_eq!(cell(&text, &["4"], "gr_node"), "-0.3156675377072605");
}

#[test]
fn table_cells_match_published_magnitudes() {
    let t2 = stdout(&ratquad(&["table", "2", "--ns", "14", "--omegas", "25"]));
    assert_eq!(cell(&t2, &["25", "14"], "OR"), "0.122(-12)");
    let t3 = stdout(&ratquad(&["table", "3", "--ns", "6"]));
    assert_eq!(cell(&t3, &["6"], "GR"), "0.161(-19)");
    let t5 = stdout(&ratquad(&["table", "5", "--ns", "5", "--omegas", "2"]));
    assert_eq!(cell(&t5, &["2", "5"], "OR"), "0.79(-8)");
}

#[test]
fn table_sci_style() {
    let t = stdout(&ratquad(&["table", "2", "--ns", "6", "--omegas", "5", "--sci"]));
    assert_eq!(cell(&t, &["5", "6"], "GR"), "2.611e-6");
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["props", "--trials", "4", "--max-n", "4", "--seed", "11", "--k", "20"];
    let a = ratquad(&args);
    let b = ratquad(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = ratquad(&["props", "--trials", "4", "--max-n", "4", "--seed", "12", "--k", "20"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn interlacing_suite_passes() {
    let v = json(&ratquad(&["props", "--suite", "interlacing", "--trials", "50"]));
    assert_eq!(v["passed"], true);
    for s in v["suites"].as_array().unwrap() {
        assert_eq!(s["passed"], 50, "{s}");
    }
}

#[test]
fn sqrt_generator_sums_diverge() {
    let v = json(&ratquad(&["props", "--suite", "denseness", "--gen", "sqrt", "--k", "100"]));
    let d = &v["denseness"][0];
    assert_eq!(d["generator"], "sqrt");
    assert_eq!(d["growing"], true);
    assert_eq!(d["partial_sums"].as_array().unwrap().len(), 100);
}

#[test]
fn distances_decrease() {
    for args in [
        &["dist", "--kind", "gl", "--ns", "10,20,40", "--grid", "3"][..],
        &["dist", "--gen", "conv:0.5:0.3", "--ns", "10,20,40"][..],
    ] {
        let v = json(&ratquad(args));
        let ks: Vec<f64> = v["pairs"].as_array().unwrap().iter().map(|p| num(&p["ks"])).collect();
        assert!(ks.windows(2).all(|w| w[1] < w[0]), "{ks:?}");
    }
}

#[test]
fn arcsin_density_at_origin() {
    let v = json(&ratquad(&["dist", "--kind", "gl", "--ns", "4", "--grid", "3"]));
    let mid = &v["density"][1];
    assert_eq!(num(&mid["x"]), 0.0);
    assert!((num(&mid["pdf"]) - std::f64::consts::FRAC_1_PI).abs() < 1e-15);
}

#[test]
fn integrate_reports_reference() {
    let v = json(&ratquad(&["integrate", "--integrand", "i1:5", "--kind", "or", "--n", "6"]));
    assert_eq!(v["provenance"], "closed-form");
    let e = num(&v["relative_error"]);
    assert!((1e-7..1e-6).contains(&e), "{e}");
    let v = json(&ratquad(&["integrate", "--integrand", "i3:2", "--kind", "gl", "--n", "5"]));
    assert_eq!(v["provenance"], "high-precision reference");
    assert_eq!(v["params"], Value::Null);
}

#[test]
fn out_flag_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rule.json");
    let direct = ratquad(&["rule", "--kind", "or", "--n", "4", "--out", out.to_str().unwrap()]);
    assert!(direct.status.success());
    assert!(direct.stdout.is_empty());
    let written = std::fs::read_to_string(&out).unwrap();

    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "prec = 256\n\n[rule]\nkind = \"or\"\nn = 4\nparams = \"sqrt\"\n").unwrap();
    let via_config = ratquad(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(via_config.status.success());
    assert_eq!(stdout(&via_config), written);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| ratquad(args).status.code();
    assert_eq!(code(&["rule", "--kind", "gl", "--n", "3"]), Some(0));
    assert_eq!(code(&["rule", "--kind", "xx", "--n", "3"]), Some(2));
    assert_eq!(code(&["rule", "--kind", "gr"]), Some(2));
    assert_eq!(code(&["rule", "--kind", "or", "--n", "2", "--params", "list:0.1,0.2,0.3"]), Some(2));
    assert_eq!(code(&["rule", "--kind", "gr", "--n", "2", "--params", "ladder:9:9"]), Some(2));
    assert_eq!(code(&["table", "6"]), Some(2));
    assert_eq!(code(&["props", "--suite", "nope"]), Some(2));
    assert_eq!(
        code(&["--prec", "64", "--escalations", "0", "rule", "--kind", "gr", "--n", "10"]),
        Some(3)
    );

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[rule]\nkind = \"gr\"\nn = 2\ncolour = \"blue\"\n").unwrap();
    assert_eq!(code(&["run", "--config", cfg.to_str().unwrap()]), Some(2));
    std::fs::write(&cfg, "prec = 128\n").unwrap();
    assert_eq!(code(&["run", "--config", cfg.to_str().unwrap()]), Some(2));
}
