use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name);
    p.to_str().unwrap().to_string()
}

/// Runs the built binary: stdout, stderr and exit code.
fn zetalab(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_zetalab")).args(args).output().unwrap();
    (String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap(), out.status.code().unwrap())
}

fn json(stdout: &str) -> Value {
    serde_json::from_str(stdout).unwrap_or_else(|e| panic!("{e}: {stdout}"))
}

fn verdicts(report: &Value) -> Vec<(String, String)> {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["name"].as_str().unwrap().to_string(), c["verdict"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn count_projective_line() {
    let (out, _, code) = zetalab(&["count", "--spec", &data("p1.vty"), "--p", "3", "--degrees", "3"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["counts"], serde_json::json!([4, 10, 28]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["config"]["precision"], 50);
    let (text, _, _) = zetalab(&["count", "--spec", &data("p1.vty"), "--p", "3", "--degrees", "3", "--format", "text"]);
    assert!(text.contains("4 10 28"), "{text}");
}

#[test]
fn malformed_spec_is_a_user_error() {
    let (out, err, code) = zetalab(&["count", "--spec", &data("malformed.vty"), "--p", "3", "--degrees", "3"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("line 1"), "{err}");
    let (_, err, code) = zetalab(&["count", "--spec", "/nonexistent.vty", "--p", "3"]);
    assert_eq!(code, 1, "{err}");
    let (_, err, code) = zetalab(&["count", "--spec", &data("p1.vty"), "--p", "4"]);
    assert_eq!(code, 1, "{err}");
    let (_, _, code) = zetalab(&["count"]);
    assert_eq!(code, 1);
}

#[test]
fn weil_on_the_curve_over_f5() {
    let (out, _, code) = zetalab(&["check", "weil", "--spec", &data("e5.vty"), "--p", "5", "--betti", "1,2,1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(verdicts(&v), vec![("zeta-reconstruction".into(), "INFO".into()), ("weil".into(), "PASS".into())]);
    assert_eq!(v["checks"][0]["supplied_fixtures"]["betti"], serde_json::json!([1, 2, 1]));
}

#[test]
fn tate_on_the_projective_plane() {
    let (out, _, code) = zetalab(&["check", "tate", "--spec", &data("p2.vty"), "--p", "3", "--k0-rank", "3"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["verdict"], "PASS");
    let (out, _, code) = zetalab(&["check", "tate", "--spec", &data("p2.vty"), "--p", "3", "--k0-rank", "2"]);
    assert_eq!((code, json(&out)["verdict"].as_str().unwrap()), (3, "FAIL"));
    let (out, _, code) = zetalab(&["check", "tate", "--spec", &data("p2.vty"), "--p", "3"]);
    assert_eq!((code, json(&out)["verdict"].as_str().unwrap()), (4, "UNSUPPORTED"));
}

#[test]
fn beilinson_on_spec_q() {
    let (out, _, code) = zetalab(&["check", "beilinson", "--model", &data("specq.json"), "--j", "1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(verdicts(&v)[0], ("beilinson-even-j1".into(), "PASS".into()));
    let (out, _, code) = zetalab(&["check", "beilinson", "--model", &data("specq.json"), "--j", "1", "--k0-rank", "2"]);
    assert_eq!((code, json(&out)["verdict"].as_str().unwrap()), (3, "FAIL"));
    let (out, _, code) = zetalab(&["check", "beilinson", "--model", &data("e11.json")]);
    assert_eq!((code, json(&out)["verdict"].as_str().unwrap()), (4, "UNSUPPORTED"));
}

#[test]
fn zeta_and_nc_reports_pass_on_the_corpus() {
    for (spec, p) in [("p1.vty", "3"), ("p2.vty", "2"), ("e5.vty", "5"), ("zi.vty", "3"), ("fermat3.vty", "7")] {
        for cmd in ["zeta", "nc"] {
            let (out, err, code) = zetalab(&[cmd, "--spec", &data(spec), "--p", p]);
            assert_eq!(code, 0, "{cmd} {spec}: {err}{out}");
            let v = json(&out);
            assert!(verdicts(&v).iter().all(|(_, verdict)| verdict == "PASS" || verdict == "INFO"), "{cmd} {spec}");
        }
    }
}

#[test]
fn underdetermined_counts_give_a_partial_report() {
    let (out, _, code) = zetalab(&["zeta", "--spec", &data("e5.vty"), "--p", "5", "--degrees", "2"]);
    assert_eq!(code, 4);
    let v = json(&out);
    assert_eq!(verdicts(&v), vec![("zeta-reconstruction".into(), "INDETERMINATE".into())]);
}

#[test]
fn lfun_reports() {
    let (out, _, code) = zetalab(&["lfun", "--model", &data("p1.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    let names: Vec<String> = verdicts(&v).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, ["euler-even", "dirichlet-even", "bounds-even", "euler-odd", "dirichlet-odd", "bounds-odd"]);
    let coeffs = &v["checks"][1]["details"]["coefficients"];
    assert_eq!(coeffs[11], "6");
    // excluding the ramified prime leaves nothing to compare against
    let (out, _, _) = zetalab(&["lfun", "--model", &data("zi.json")]);
    let v = json(&out);
    assert_eq!(v["checks"][0]["verdict"], "INFO");
    assert!(v["unverified_hypotheses"].to_string().contains("[2]"));
    let (out, _, code) = zetalab(&["lfun", "--model", &data("zi.json"), "--replace-bad-primes"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["checks"][0]["verdict"], "PASS");
}

#[test]
fn serre_names_one_check_per_weight() {
    let (out, _, code) = zetalab(&["check", "serre", "--model", &data("e11.json"), "--w", "1"]);
    assert_eq!(code, 0);
    assert_eq!(verdicts(&json(&out)), vec![("serre-w1".into(), "PASS".into())]);
}

#[test]
fn config_layering() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.conf");
    std::fs::write(&file, "# local\nweil_tol = 1e-20\nprecision = 40\nformat = text\n").unwrap();
    let f = file.to_str().unwrap();
    let (out, _, code) = zetalab(&["--config", f, "--show-config"]);
    assert_eq!(code, 0);
    assert!(out.contains("weil_tol = 1e-20") && out.contains("precision = 40"), "{out}");
    let (out, _, _) = zetalab(&["--config", f, "--set", "precision=60", "--show-config", "--format", "json"]);
    let v = json(&out);
    assert_eq!((v["precision"].as_u64(), v["weil_tol"].as_f64()), (Some(60), Some(1e-20)));
    let (out, _, _) = zetalab(&["--config", f, "--set", "precision=60", "--precision", "70", "--show-config", "--format", "json"]);
    assert_eq!(json(&out)["precision"], 70);
    let (_, err, code) = zetalab(&["--set", "nonsense=1", "--show-config"]);
    assert_eq!(code, 1, "{err}");
    let (_, err, code) = zetalab(&["--set", "functional_tol=-1", "--show-config"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn budget_overrun_is_a_user_error() {
    let (_, err, code) =
        zetalab(&["--set", "enumeration_budget=100", "count", "--spec", &data("fermat3.vty"), "--p", "7", "--degrees", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("budget"), "{err}");
}

#[test]
fn text_reports_render_every_check() {
    let (out, _, code) = zetalab(&["nc", "--spec", &data("p2.vty"), "--p", "3", "--k0-rank", "3", "--format", "text"]);
    assert_eq!(code, 0);
    for name in ["nc-weil", "nc-ladic", "nc-functional", "reciprocity", "nc-factorization", "order-additivity", "strong-tate"] {
        assert!(out.contains(&format!("[PASS] {name}")), "{name}: {out}");
    }
}
