use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn esl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esl"))
        .args(args)
        .output()
        .expect("esl runs")
}

fn esl_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esl"))
        .args(args)
        .env(key, value)
        .output()
        .expect("esl runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_valid(report: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/esl-report-1.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::draft202012::new(&schema).expect("schema compiles");
    let errors: Vec<String> = validator
        .iter_errors(report)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

const HOWALD: &str = "map{n=3,m=1}\nf1 = x1^2*x2^2*x3^2\n";

#[test]
fn exact_monomial_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("f.map");
    let out_path = dir.path().join("report.json");
    std::fs::write(&spec, HOWALD).unwrap();
    let out = esl(&[
        "exact",
        spec.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_valid(&report);
    assert_eq!(report["command"], "exact");
    assert_eq!(report["exact"]["lct_map"]["value"]["value"], "1/2");
    assert_eq!(report["exact"]["eps"]["exact"]["value"], "1");
}

#[test]
fn exact_equidimensional() {
    let out = esl(&[
        "exact",
        "map{n=2,m=2}\nf1 = x1\nf2 = x1^2 + x1^2*x2^3",
        "--json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let r = json(&out);
    assert_valid(&r);
    assert_eq!(r["exact"]["eps"]["exact"]["value"], "1/2");
    assert_eq!(r["exact"]["eps"]["exact"]["source"], "eps_equidimensional");
}

#[test]
fn exact_identity_is_infinite() {
    let out = esl(&["exact", "map{n=2,m=2}\nf1 = x1\nf2 = x2", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let r = json(&out);
    assert_valid(&r);
    assert_eq!(r["exact"]["eps"]["exact"]["value"], "inf");
    let k = r["exact"]["k_bounds"]["upper"]["value"].as_u64().unwrap();
    assert!(k <= 2);
}

#[test]
fn exact_at_base_point() {
    let out = esl(&["exact", "map{n=1,m=1}\nf1 = x1^3 - 3*x1\nat (1)", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let r = json(&out);
    assert_valid(&r);
    assert_eq!(r["map"]["point"][0], "1");
    assert_eq!(r["exact"]["eps"]["exact"]["value"], "1");
}

#[test]
fn spec_from_stdin() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_esl"))
        .args(["exact", "-", "--json"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(HOWALD.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["exact"]["eps"]["exact"]["value"], "1");
}

#[test]
fn negative_exponent_is_a_parse_error() {
    let out = esl(&["exact", "map{n=1,m=1}\nf1 = x1^-1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("2:9"), "{err}");
    assert!(err.contains("negative exponent"), "{err}");
}

#[test]
fn unknown_variable_and_missing_file() {
    let out = esl(&["exact", "map{n=1,m=1}\nf1 = x2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = esl(&["exact", "/no/such/file.map"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no such spec file"));
}

#[test]
fn non_monomial_error_is_not_repeated() {
    let out = esl(&["exact", "map{n=2,m=1}\nf1 = x1^2 + x1*x2^2 + x2^5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert_eq!(err.matches("is not a monomial").count(), 1, "{err}");
}

#[test]
fn real_square_matches_exact() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("hist.csv");
    let out = esl(&[
        "real",
        "map{n=1,m=1} f1 = x1^2",
        "--samples",
        "400000",
        "--seed",
        "7",
        "--workers",
        "2",
        "--csv",
        csv.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let r = json(&out);
    assert_valid(&r);
    let eps = r["real"]["eps_hat"]["value"]["eps"].as_f64().unwrap();
    assert!((eps - 1.0).abs() <= 0.15, "{eps}");
    let hist = std::fs::read_to_string(csv).unwrap();
    assert_eq!(hist.lines().next(), Some("bin_left,bin_right,mass"));
    assert_eq!(hist.lines().count(), 41);
}

#[test]
fn real_is_reproducible() {
    let args = [
        "real",
        "map{n=2,m=1} f1 = x1*x2",
        "--samples",
        "50000",
        "--seed",
        "3",
        "--json",
    ];
    let a = json(&esl(&args));
    let b = json(&esl(&args));
    assert_valid(&a);
    assert_eq!(a["real"], b["real"]);
}

#[test]
fn real_rejects_vector_maps() {
    let out = esl(&[
        "real",
        "map{n=2,m=2}\nf1 = x1\nf2 = x1*x2",
        "--samples",
        "1000",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn padic_xy_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("masses.csv");
    let out = esl(&[
        "padic",
        "map{n=2,m=1} f1 = x1*x2",
        "-p",
        "3",
        "-k",
        "4",
        "--csv",
        csv.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let r = json(&out);
    assert_valid(&r);
    assert_eq!(r["padic"]["log_explosion"], true);
    assert!(r["padic"]["eps_hat"].is_null());
    let rows = r["padic"]["table"]["value"]["rows"].as_array().unwrap();
    for (k, row) in rows.iter().enumerate() {
        // closed form: ratio = 1 + k (1 - 1/p)
        let expected = format!("{}/3", 3 + 2 * k);
        let got = row["ratio"].as_str().unwrap();
        assert!(
            got == expected || (k % 3 == 0 && got == format!("{}/1", 1 + 2 * k / 3)),
            "{got}"
        );
    }
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("k,mass_num,mass_den,ratio_num,ratio_den")
    );
    assert_eq!(lines.next(), Some("0,1,1,1,1"));
    assert_eq!(lines.next(), Some("1,5,9,5,3"));
}

#[test]
fn padic_classifies_deep_tables() {
    let out = esl(&[
        "padic",
        "map{n=1,m=1} f1 = x1^2",
        "-p",
        "3",
        "-k",
        "12",
        "--json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let r = json(&out);
    assert_valid(&r);
    let eps = r["padic"]["eps_hat"]["value"]["eps"].as_f64().unwrap();
    assert!((eps - 1.0).abs() < 0.05, "{eps}");
}

#[test]
fn cell_budget_is_enforced() {
    let args = [
        "padic",
        "map{n=2,m=1} f1 = x1^2 + x2^3",
        "-p",
        "3",
        "-k",
        "4",
    ];
    let out = esl_env(&args, "ESL_CELL_BUDGET", "10");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("budget is 10"));
    let out = esl_env(&args, "ESL_CELL_BUDGET", "many");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    for suite in ["howald-family", "young-algebra", "chain", "padic-xy"] {
        let out = esl(&["verify", suite, "--json"]);
        assert!(out.status.success(), "{suite}: {}", stderr(&out));
        let r = json(&out);
        assert_valid(&r);
        let checks = r["checks"].as_array().unwrap();
        assert!(!checks.is_empty());
        assert!(checks.iter().all(|c| c["passed"] == true));
    }
}

#[test]
fn unknown_suite_fails() {
    let out = esl(&["verify", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("howald-family"));
}
