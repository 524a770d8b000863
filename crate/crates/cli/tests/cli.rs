use std::process::{Command, Output};

use downup::{parse_gwa_element, BiPoly, DownUpPresentation, GwaElement, ParamSpec, Scalar};
use serde_json::Value;

fn downup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_downup"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn structured(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    let o = downup(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn indices_case_table() {
    let o = downup(&["--d", "1", "--n1", "3", "--n2", "2", "indices"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("I = {0,1}"), "{out}");
    assert!(out.contains("J = {0,1}"), "{out}");
    assert!(out.contains("case: b1>b2 / b1=b2+1"), "{out}");
}

#[test]
fn indices_enumerated() {
    let v = structured(&["--d", "1", "--n1", "2", "--n2", "5", "indices"]);
    assert_eq!(v["result"]["I"], "{0,1,2,3}");
    assert_eq!(v["result"]["J"], "{0,1,2,3}");
    assert_eq!(v["command"], "indices");
}

#[test]
fn indices_empty_set_is_noted() {
    let o = downup(&["--d", "1", "--n1", "2", "--n2", "-3", "indices"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("I = ∅ (no solutions)"));
}

#[test]
fn invalid_spec_is_rejected() {
    let o = downup(&["--d", "1", "--n1", "1", "--n2", "-2", "indices"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reciprocal integer"));
    let o = downup(&["--n1", "2", "--n2", "3", "indices"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing --d"));
}

#[test]
fn mul_x_y_and_round_trip() {
    let v = structured(&["--d", "1", "--n1", "2", "--n2", "3", "--f", "1, 1", "mul", "x", "y"]);
    let spec = ParamSpec::new(1, 2, 3).unwrap();
    let p = DownUpPresentation::new(spec.clone(), vec![Scalar::one(), Scalar::one()]);
    let alg = p.gwa_algebra().unwrap();
    let parsed = parse_gwa_element(&alg, v["result"].as_str().unwrap()).unwrap();
    let expect = BiPoly::k().scale(&spec.s()).add(&alg.g().scale_h(&spec, 1));
    assert_eq!(parsed, GwaElement::from_poly(expect));
    for key in ["command", "inputs", "result", "witnesses"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn translate_relation() {
    let o = downup(&["--d", "2", "--n1", "-1", "--n2", "3", "--f", "z, 0, 2", "translate", "d*u - s*u*d"]);
    assert!(o.status.success());
    // d u − s u d = −f(h)
    assert_eq!(stdout(&o).trim(), "-z - 2*h^2");
}

#[test]
fn alphabet_selection() {
    let base = ["--d", "1", "--n1", "2", "--n2", "3"];
    let run = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend(extra);
        downup(&a)
    };
    assert!(run(&["mul", "d", "u"]).status.success());
    assert!(run(&["--alphabet", "gwa", "mul", "x", "k"]).status.success());
    let o = run(&["--alphabet", "du", "mul", "x", "y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 0"));
    assert_eq!(run(&["mul", "d*k", "u"]).status.code(), Some(2));
}

#[test]
fn inner_dichotomy() {
    // n2 = 2·n1 + d
    let o = downup(&["--d", "1", "--n1", "2", "--n2", "5", "inner", "h^2*k"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "non-inner at (2,1)");
    let v = structured(&["--d", "1", "--n1", "2", "--n2", "3", "inner", "h^2*k"]);
    assert_eq!(v["result"]["inner"], true);
}

#[test]
fn derive_reports_generators() {
    let v = structured(&["--d", "1", "--n1", "2", "--n2", "3", "--f", "1", "derive", "c0 = h", "x"]);
    assert_eq!(v["result"], "h*x");
    assert_eq!(v["witnesses"]["D(h)"], "0");
    let o = downup(&["--d", "1", "--n1", "2", "--n2", "3", "derive", "w = 1; alpha_h = {0: 1}", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_leibniz() {
    let o = downup(&["--d", "1", "--n1", "2", "--n2", "3", "--f", "1, 1", "verify", "leibniz", "--seed", "7", "--samples", "100"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "leibniz: 100/100 pass");
}

#[test]
fn verify_rejects_unknown_suite() {
    let o = downup(&["--d", "1", "--n1", "2", "--n2", "3", "verify", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_supplies_parameters() {
    let path = std::env::temp_dir().join(format!("downup-cli-test-{}.toml", std::process::id()));
    std::fs::write(&path, "d = 1\nn1 = 3\nn2 = 2\nformat = \"structured\"\n").unwrap();
    let p = path.to_str().unwrap();
    let o = downup(&["--config", p, "indices"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["inputs"]["n1"], 3);
    // flags win over the file
    let o = downup(&["--config", p, "--n1", "2", "--n2", "5", "--format", "human", "indices"]);
    assert!(stdout(&o).contains("b1 = 2, b2 = 5"));
    std::fs::remove_file(&path).unwrap();
}
