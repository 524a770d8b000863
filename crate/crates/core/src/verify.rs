//! Seeded property suites shared by the command-line front end and the
//! integration tests.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bipoly::BiPoly;
use crate::derivations::{
    apply_derivation, apply_inner, build_alpha_derivation, build_c_derivation, index_sets, multiplier_indices,
    solve_inner, AlphaSpec, CTypeSpec, Derivation,
};
use crate::downup::{defining_relations, DownUpPresentation};
use crate::gwa::{GwaAlgebra, GwaElement};
use crate::oracle::{oracle_normalize, phi_by_substitution, inner_system_solvable, word_of, Letter};
use crate::scalars::{ParamSpec, Scalar};

/// Random inputs of bounded size.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn nonzero_int(&mut self, bound: i64) -> i64 {
        loop {
            let n = self.rng.gen_range(-bound..=bound);
            if n != 0 {
                return n;
            }
        }
    }

    /// A nonzero integer, occasionally times a power of `z` or over `z + 1`.
    pub fn scalar(&mut self) -> Scalar {
        let c = Scalar::from_int(self.nonzero_int(3));
        match self.rng.gen_range(0..6) {
            0 => c.mul(&Scalar::z_pow(self.rng.gen_range(-2..=2))),
            1 => c
                .div(&Scalar::z_pow(1).add(&Scalar::one()))
                .expect("z + 1 is nonzero"),
            _ => c,
        }
    }

    pub fn bipoly(&mut self, max_terms: usize, max_deg: u32) -> BiPoly {
        let n = self.rng.gen_range(0..=max_terms);
        (0..n).fold(BiPoly::zero(), |acc, _| {
            let (i, j) = (self.rng.gen_range(0..=max_deg), self.rng.gen_range(0..=max_deg));
            acc.add(&BiPoly::monomial(self.scalar(), i, j))
        })
    }

    pub fn element(&mut self) -> GwaElement {
        let n = self.rng.gen_range(1..=2);
        (0..n).fold(GwaElement::zero(), |acc, _| {
            let w = self.rng.gen_range(-2..=2);
            acc.add(&GwaElement::homogeneous(self.bipoly(2, 1), w))
        })
    }

    /// Dense coefficients with support inside `{0..=max_deg}`.
    pub fn f_coeffs(&mut self, max_deg: usize) -> Vec<Scalar> {
        (0..=max_deg)
            .map(|_| {
                if self.rng.gen_bool(0.4) {
                    self.scalar()
                } else {
                    Scalar::zero()
                }
            })
            .collect()
    }

    pub fn param_spec(&mut self) -> ParamSpec {
        loop {
            let d = self.rng.gen_range(1..=3);
            let n1 = self.nonzero_int(5);
            let n2 = self.nonzero_int(5);
            if let Ok(spec) = ParamSpec::new(d, n1, n2) {
                return spec;
            }
        }
    }

    pub fn word(&mut self, len: usize) -> Vec<Letter> {
        const LETTERS: [Letter; 4] = [Letter::X, Letter::Y, Letter::H, Letter::K];
        (0..len).map(|_| *LETTERS.choose(&mut self.rng).expect("nonempty")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Leibniz,
    Oracle,
    Associativity,
    Conformal,
    Inner,
    Relations,
    Indices,
    Sigma,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Leibniz,
        Suite::Oracle,
        Suite::Associativity,
        Suite::Conformal,
        Suite::Inner,
        Suite::Relations,
        Suite::Indices,
        Suite::Sigma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Leibniz => "leibniz",
            Suite::Oracle => "oracle",
            Suite::Associativity => "associativity",
            Suite::Conformal => "conformal",
            Suite::Inner => "inner",
            Suite::Relations => "relations",
            Suite::Indices => "indices",
            Suite::Sigma => "sigma",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: usize,
    pub failed: usize,
    /// Descriptions of the first few failures.
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport {
            suite,
            passed: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    pub fn record(&mut self, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => self.passed += 1,
            Err(msg) => {
                self.failed += 1;
                if self.failures.len() < 5 {
                    self.failures.push(msg);
                }
            }
        }
    }

    pub fn total(&self) -> usize {
        self.passed + self.failed
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}/{} pass", self.suite, self.passed, self.total())
    }
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

/// `∂(uv) = ∂(u)σ_μ(v) + u∂(v)`.
pub fn leibniz_holds(alg: &GwaAlgebra, d: &Derivation, u: &GwaElement, v: &GwaElement) -> bool {
    let lhs = apply_derivation(alg, d, &alg.mul(u, v));
    let rhs = alg
        .mul(&apply_derivation(alg, d, u), &alg.apply_sigma_mu(v))
        .add(&alg.mul(u, &apply_derivation(alg, d, v)));
    lhs == rhs
}

/// One c-type derivation plus an α-type derivation for every weight in
/// `-3..=3` whose multiplier index set is nonempty.
pub fn sample_derivations(alg: &GwaAlgebra, sampler: &mut Sampler) -> Vec<(String, Derivation)> {
    let spec = alg.spec();
    let mut c0 = sampler.bipoly(2, 2);
    if c0.is_zero() {
        c0 = BiPoly::h();
    }
    let c = CTypeSpec { c0 };
    let mut out = vec![(format!("c0 = {}", c.c0), build_c_derivation(spec, &c))];
    let admissible = multiplier_indices(spec).elements_up_to(3);
    if admissible.is_empty() {
        return out;
    }
    for w in (-3..=3).filter(|&w| w != 0) {
        let mut mult = BTreeMap::new();
        for &t in &admissible {
            if sampler.rng().gen_bool(0.7) {
                mult.insert(t, sampler.scalar());
            }
        }
        if mult.is_empty() {
            mult.insert(admissible[0], Scalar::one());
        }
        if let Ok(a) = AlphaSpec::from_multiplier(spec, w, &mult) {
            if let Ok(d) = build_alpha_derivation(spec, alg.g(), &a) {
                out.push((a.to_string(), d));
            }
        }
    }
    out
}

pub fn run_leibniz(alg: &GwaAlgebra, sampler: &mut Sampler, samples: usize) -> SuiteReport {
    let mut report = SuiteReport::new(Suite::Leibniz);
    let ds = sample_derivations(alg, sampler);
    for n in 0..samples {
        let (label, d) = &ds[n % ds.len()];
        let (u, v) = (sampler.element(), sampler.element());
        report.record(check(leibniz_holds(alg, d, &u, &v), || {
            format!("{label}: u = {u}, v = {v}")
        }));
    }
    report
}

fn oracle_of_word(alg: &GwaAlgebra, w: &[Letter]) -> Result<GwaElement, String> {
    oracle_normalize(alg, &word_of(w)).map_err(|e| e.to_string())
}

/// `oracle(w1·w2) = oracle(w1)·oracle(w2)`.
pub fn oracle_pair_agrees(alg: &GwaAlgebra, w1: &[Letter], w2: &[Letter]) -> Result<(), String> {
    let joined: Vec<Letter> = w1.iter().chain(w2).copied().collect();
    let whole = oracle_of_word(alg, &joined)?;
    let parts = alg.mul(&oracle_of_word(alg, w1)?, &oracle_of_word(alg, w2)?);
    check(whole == parts, || format!("{w1:?} * {w2:?}"))
}

pub fn run_oracle(alg: &GwaAlgebra, sampler: &mut Sampler, samples: usize) -> SuiteReport {
    let mut report = SuiteReport::new(Suite::Oracle);
    for _ in 0..samples {
        let total = sampler.rng().gen_range(0..=4);
        let split = sampler.rng().gen_range(0..=total);
        let (w1, w2) = (sampler.word(split), sampler.word(total - split));
        report.record(oracle_pair_agrees(alg, &w1, &w2));
    }
    report
}

pub fn run_associativity(alg: &GwaAlgebra, sampler: &mut Sampler, samples: usize) -> SuiteReport {
    let mut report = SuiteReport::new(Suite::Associativity);
    for _ in 0..samples {
        let (a, b, c) = (sampler.element(), sampler.element(), sampler.element());
        let left = alg.mul(&alg.mul(&a, &b), &c);
        let right = alg.mul(&a, &alg.mul(&b, &c));
        report.record(check(left == right, || format!("({a}) ({b}) ({c})")));
    }
    report
}

/// `f(X) = s·g(X) − g(rX)` and `supp(g) = supp(f)`.
pub fn conformal_holds(p: &DownUpPresentation) -> Result<(), String> {
    let spec = p.spec();
    let g = p.solve_conformal().map_err(|e| e.to_string())?;
    let gb = g.as_bipoly();
    let back = gb.scale(&spec.s()).sub(&gb.scale_h(spec, 1));
    check(back == p.f_as_bipoly(), || format!("f = {}, g = {gb}", p.f_as_bipoly()))?;
    check(g.support() == p.f_support(), || format!("support mismatch for f = {}", p.f_as_bipoly()))
}

pub fn run_conformal(spec: &ParamSpec, sampler: &mut Sampler, samples: usize) -> SuiteReport {
    let mut report = SuiteReport::new(Suite::Conformal);
    for _ in 0..samples {
        let p = DownUpPresentation::new(spec.clone(), sampler.f_coeffs(6));
        report.record(conformal_holds(&p));
    }
    report
}

/// Either `solve_inner` succeeds and the inner derivation of `p` agrees with
/// the c-type derivation on `x, y, h, k`, or it fails and the linear system
/// over `supp(c0)` is infeasible.
pub fn inner_dichotomy_holds(alg: &GwaAlgebra, c0: &BiPoly) -> Result<(), String> {
    let spec = alg.spec();
    let c = CTypeSpec { c0: c0.clone() };
    let expect_inner = c0.terms().all(|(&(b, g), _)| spec.rs_exponent(b as i64, g as i64) != spec.n2());
    match solve_inner(spec, &c) {
        Ok(p) => {
            check(expect_inner, || format!("c0 = {c0}: solved but the exponent test says non-inner"))?;
            let d = build_c_derivation(spec, &c);
            let b = GwaElement::from_poly(p);
            for gen in [GwaElement::x(), GwaElement::y(), GwaElement::h(), GwaElement::k()] {
                let inner = apply_inner(alg, &b, &gen);
                let direct = apply_derivation(alg, &d, &gen);
                check(inner == direct, || format!("c0 = {c0}: mismatch on {gen}"))?;
            }
            Ok(())
        }
        Err(e) => {
            check(!expect_inner, || format!("c0 = {c0}: {e} but the exponent test says inner"))?;
            check(!inner_system_solvable(spec, &c0.support(), c0), || {
                format!("c0 = {c0}: {e} but the linear system is feasible")
            })
        }
    }
}

pub fn run_inner(alg: &GwaAlgebra, sampler: &mut Sampler, samples: usize) -> SuiteReport {
    let mut report = SuiteReport::new(Suite::Inner);
    for _ in 0..samples {
        let (beta, gamma) = (sampler.rng().gen_range(0..=4), sampler.rng().gen_range(0..=4));
        let c0 = BiPoly::monomial(sampler.scalar(), beta, gamma);
        report.record(inner_dichotomy_holds(alg, &c0));
    }
    report
}

/// Every defining relation translates to zero.
pub fn relations_vanish(p: &DownUpPresentation) -> Result<(), String> {
    for rel in defining_relations(p) {
        let value = p.translate_to_gwa(&rel).map_err(|e| e.to_string())?;
        check(value.is_zero(), || format!("{rel} -> {value}"))?;
    }
    Ok(())
}

pub fn run_relations(spec: &ParamSpec, sampler: &mut Sampler, samples: usize) -> SuiteReport {
    let mut report = SuiteReport::new(Suite::Relations);
    for _ in 0..samples {
        let p = DownUpPresentation::new(spec.clone(), sampler.f_coeffs(4));
        report.record(relations_vanish(&p));
    }
    report
}

/// Membership by direct evaluation of the defining divisibility conditions.
pub fn index_membership(spec: &ParamSpec, t: u64) -> (bool, bool) {
    let (d, n1, n2) = (spec.d() as i128, spec.n1() as i128, spec.n2() as i128);
    let t = t as i128;
    let nat = |num: i128| num >= 0 && num % d == 0;
    (nat(n2 + n1 - n1 * t), nat(n2 + d - n1 * t))
}

pub fn indices_agree_up_to(spec: &ParamSpec, bound: u64) -> Result<(), String> {
    let (i_set, j_set) = index_sets(spec);
    for t in 0..=bound {
        let (in_i, in_j) = index_membership(spec, t);
        check(i_set.contains(t) == in_i, || format!("{spec}: I disagrees at t = {t}"))?;
        check(j_set.contains(t) == in_j, || format!("{spec}: J disagrees at t = {t}"))?;
    }
    Ok(())
}

pub fn run_indices(spec: &ParamSpec, sampler: &mut Sampler, samples: usize) -> SuiteReport {
    let mut report = SuiteReport::new(Suite::Indices);
    report.record(indices_agree_up_to(spec, 1000));
    for _ in 1..samples {
        let other = sampler.param_spec();
        report.record(indices_agree_up_to(&other, 1000));
    }
    report
}

/// `σ_μ` is multiplicative and fixes `R`; `φ` agrees with substitution.
pub fn run_sigma(alg: &GwaAlgebra, sampler: &mut Sampler, samples: usize) -> SuiteReport {
    let mut report = SuiteReport::new(Suite::Sigma);
    let spec = alg.spec();
    for _ in 0..samples {
        let (u, v) = (sampler.element(), sampler.element());
        let lhs = alg.apply_sigma_mu(&alg.mul(&u, &v));
        let rhs = alg.mul(&alg.apply_sigma_mu(&u), &alg.apply_sigma_mu(&v));
        let p = sampler.bipoly(3, 2);
        let w = sampler.rng().gen_range(-3..=3);
        let fixes_base = alg.apply_sigma_mu(&GwaElement::from_poly(p.clone())) == GwaElement::from_poly(p.clone());
        let phi_ok = p.apply_phi_power(spec, w) == phi_by_substitution(spec, &p, w);
        report.record(check(lhs == rhs && fixes_base && phi_ok, || format!("u = {u}, v = {v}, p = {p}, w = {w}")));
    }
    report
}

/// Runs one suite against the algebra attached to `p`.
pub fn run_suite(
    suite: Suite,
    p: &DownUpPresentation,
    seed: u64,
    samples: usize,
) -> Result<SuiteReport, String> {
    let mut sampler = Sampler::new(seed);
    let spec = p.spec();
    let alg = || p.gwa_algebra().map_err(|e| e.to_string());
    Ok(match suite {
        Suite::Leibniz => run_leibniz(&alg()?, &mut sampler, samples),
        Suite::Oracle => run_oracle(&alg()?, &mut sampler, samples),
        Suite::Associativity => run_associativity(&alg()?, &mut sampler, samples),
        Suite::Conformal => run_conformal(spec, &mut sampler, samples),
        Suite::Inner => run_inner(&alg()?, &mut sampler, samples),
        Suite::Relations => run_relations(spec, &mut sampler, samples),
        Suite::Indices => run_indices(spec, &mut sampler, samples),
        Suite::Sigma => run_sigma(&alg()?, &mut sampler, samples),
    })
}
