use anyhow::{Context, Result};
use downup::derivations::{apply_derivation, table_case, DerivationSpec};
use downup::expr::evaluate;
use downup::verify::{run_suite, Suite};
use downup::{index_sets, parse_bipoly, solve_inner, CTypeSpec, DownUpPresentation, GwaAlgebra, GwaElement};
use serde_json::{json, Map, Value};

use crate::config::{parse_in, RunConfig};

/// Outcome of one command: lines for people, a document for programs.
pub struct Report {
    pub command: &'static str,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub witnesses: Map<String, Value>,
    pub lines: Vec<String>,
    pub ok: bool,
}

impl Report {
    fn new(command: &'static str, cfg: &RunConfig) -> Self {
        let mut inputs = Map::new();
        inputs.insert("d".into(), json!(cfg.spec.d()));
        inputs.insert("n1".into(), json!(cfg.spec.n1()));
        inputs.insert("n2".into(), json!(cfg.spec.n2()));
        inputs.insert("f".into(), json!(cfg.f.iter().map(ToString::to_string).collect::<Vec<_>>()));
        Report {
            command,
            inputs,
            result: Value::Null,
            witnesses: Map::new(),
            lines: Vec::new(),
            ok: true,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "witnesses": self.witnesses,
        })
    }
}

fn algebra(cfg: &RunConfig) -> Result<GwaAlgebra> {
    Ok(DownUpPresentation::new(cfg.spec.clone(), cfg.f.clone()).gwa_algebra()?)
}

fn element(alg: &GwaAlgebra, cfg: &RunConfig, text: &str) -> Result<GwaElement> {
    let e = parse_in(text, cfg.alphabet).with_context(|| format!("parsing '{text}'"))?;
    evaluate(alg, &e).with_context(|| format!("evaluating '{text}'"))
}

pub fn indices(cfg: &RunConfig) -> Result<Report> {
    let mut rep = Report::new("indices", cfg);
    let (i_set, j_set) = index_sets(&cfg.spec);
    rep.lines.push(format!("b1 = {}, b2 = {}", cfg.spec.b1(), cfg.spec.b2()));
    let note = if i_set.is_empty() { " (no solutions)" } else { "" };
    rep.lines.push(format!("I = {i_set}{note}"));
    rep.lines.push(format!("J = {j_set}"));
    rep.result = json!({ "I": i_set.to_string(), "J": j_set.to_string() });
    if i_set.is_empty() {
        rep.witnesses.insert("note".into(), json!("no solutions"));
    }
    if let Some(case) = table_case(&cfg.spec) {
        let label = format!("{} / {}", case.i_branch, case.j_branch);
        rep.lines.push(format!("case: {label} (q = {}, rho = {})", case.q, case.rho));
        rep.witnesses.insert("case".into(), json!(label));
        rep.witnesses.insert("q".into(), json!(case.q));
        rep.witnesses.insert("rho".into(), json!(case.rho));
    }
    Ok(rep)
}

pub fn conformal(cfg: &RunConfig) -> Result<Report> {
    let mut rep = Report::new("conformal", cfg);
    let p = DownUpPresentation::new(cfg.spec.clone(), cfg.f.clone());
    let g = p.solve_conformal()?;
    let g_poly = g.as_bipoly();
    rep.lines.push(format!("f = {}", p.f_as_bipoly()));
    rep.lines.push(format!("g = {g_poly}"));
    rep.result = json!(g_poly.to_string());
    let coeffs: Vec<String> = g.coeffs().iter().map(ToString::to_string).collect();
    rep.witnesses.insert("g_coeffs".into(), json!(coeffs));
    rep.witnesses.insert("support".into(), json!(g.support()));
    Ok(rep)
}

pub fn mul(cfg: &RunConfig, lhs: &str, rhs: &str) -> Result<Report> {
    let mut rep = Report::new("mul", cfg);
    let alg = algebra(cfg)?;
    let (a, b) = (element(&alg, cfg, lhs)?, element(&alg, cfg, rhs)?);
    let product = alg.mul(&a, &b);
    rep.inputs.insert("lhs".into(), json!(a.to_string()));
    rep.inputs.insert("rhs".into(), json!(b.to_string()));
    rep.lines.push(format!("({a}) * ({b}) = {product}"));
    rep.result = json!(product.to_string());
    rep.witnesses.insert("g".into(), json!(alg.g().to_string()));
    Ok(rep)
}

pub fn translate(cfg: &RunConfig, text: &str) -> Result<Report> {
    let mut rep = Report::new("translate", cfg);
    let alg = algebra(cfg)?;
    let u = element(&alg, cfg, text)?;
    rep.inputs.insert("expr".into(), json!(text));
    rep.lines.push(u.to_string());
    rep.result = json!(u.to_string());
    rep.witnesses.insert("g".into(), json!(alg.g().to_string()));
    Ok(rep)
}

pub fn derive(cfg: &RunConfig, spec_text: &str, target: &str) -> Result<Report> {
    let mut rep = Report::new("derive", cfg);
    let alg = algebra(cfg)?;
    let ds = DerivationSpec::parse(spec_text, &cfg.spec)?;
    let d = ds.build(&alg)?;
    let u = element(&alg, cfg, target)?;
    let value = apply_derivation(&alg, &d, &u);
    rep.inputs.insert("derivation".into(), json!(spec_text));
    rep.inputs.insert("target".into(), json!(u.to_string()));
    rep.lines.push(format!("D({u}) = {value}"));
    rep.result = json!(value.to_string());
    for (name, gen) in [
        ("x", GwaElement::x()),
        ("y", GwaElement::y()),
        ("h", GwaElement::h()),
        ("k", GwaElement::k()),
    ] {
        let v = apply_derivation(&alg, &d, &gen);
        rep.lines.push(format!("  D({name}) = {v}"));
        rep.witnesses.insert(format!("D({name})"), json!(v.to_string()));
    }
    Ok(rep)
}

pub fn inner(cfg: &RunConfig, c0_text: &str) -> Result<Report> {
    let mut rep = Report::new("inner", cfg);
    let c0 = parse_bipoly(c0_text, Some(&cfg.spec)).with_context(|| format!("parsing '{c0_text}'"))?;
    rep.inputs.insert("c0".into(), json!(c0.to_string()));
    match solve_inner(&cfg.spec, &CTypeSpec { c0 }) {
        Ok(p) => {
            rep.lines.push(format!("inner: p = {p}"));
            rep.result = json!({ "inner": true, "p": p.to_string() });
        }
        Err(e) => {
            rep.lines.push(e.to_string());
            rep.result = json!({ "inner": false, "reason": e.to_string() });
            rep.witnesses.insert("beta".into(), json!(e.beta));
            rep.witnesses.insert("gamma".into(), json!(e.gamma));
        }
    }
    Ok(rep)
}

pub fn verify(cfg: &RunConfig, suite: &str) -> Result<Report> {
    let mut rep = Report::new("verify", cfg);
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse().map_err(anyhow::Error::msg)?]
    };
    rep.inputs.insert("suite".into(), json!(suite));
    rep.inputs.insert("seed".into(), json!(cfg.seed));
    rep.inputs.insert("samples".into(), json!(cfg.samples));
    let p = DownUpPresentation::new(cfg.spec.clone(), cfg.f.clone());
    let mut results = Map::new();
    for s in suites {
        let r = run_suite(s, &p, cfg.seed, cfg.samples).map_err(anyhow::Error::msg)?;
        rep.lines.push(r.to_string());
        for failure in &r.failures {
            rep.lines.push(format!("  failed: {failure}"));
        }
        results.insert(
            s.name().into(),
            json!({ "passed": r.passed, "failed": r.failed }),
        );
        if !r.failures.is_empty() {
            rep.witnesses.insert(s.name().into(), json!(r.failures));
        }
        rep.ok &= r.ok();
    }
    rep.result = Value::Object(results);
    Ok(rep)
}
