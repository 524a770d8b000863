//! The down-up presentation `L(f, r, s, 0)` on generators `d, u, h`:
//! conformality `f(X) = s·g(X) − g(rX)` and translation to the GWA
//! generators via `d ↦ x`, `u ↦ y`, `h ↦ h` (so `ud ↦ k + g(h)`).

use thiserror::Error;

use crate::bipoly::BiPoly;
use crate::expr::{evaluate, parse_expression, Alphabet, EvalError, ExprError, ExprTarget, Expr, Generator};
use crate::gwa::{GwaAlgebra, GwaElement};
use crate::scalars::{Param, ParamSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConformalError {
    #[error("not conformal at degree {0}")]
    NotConformal(usize),
}

/// `L(f, r, s, 0)` with `f` given densely, constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DownUpPresentation {
    spec: ParamSpec,
    f: Vec<Scalar>,
}

/// The polynomial `g` with `s·g(X) − g(rX) = f(X)`, dense, constant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformalWitness {
    g: Vec<Scalar>,
}

fn trim(mut v: Vec<Scalar>) -> Vec<Scalar> {
    while v.last().is_some_and(Scalar::is_zero) {
        v.pop();
    }
    v
}

fn support(coeffs: &[Scalar]) -> Vec<usize> {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, _)| i)
        .collect()
}

impl ConformalWitness {
    pub fn coeffs(&self) -> &[Scalar] {
        &self.g
    }

    pub fn support(&self) -> Vec<usize> {
        support(&self.g)
    }

    pub fn degree(&self) -> Option<usize> {
        self.g.len().checked_sub(1)
    }

    /// `g(h)` as an element of `R`.
    pub fn as_bipoly(&self) -> BiPoly {
        BiPoly::from_h_coeffs(&self.g)
    }
}

impl DownUpPresentation {
    pub fn new(spec: ParamSpec, f: Vec<Scalar>) -> Self {
        DownUpPresentation { spec, f: trim(f) }
    }

    pub fn spec(&self) -> &ParamSpec {
        &self.spec
    }

    pub fn f(&self) -> &[Scalar] {
        &self.f
    }

    pub fn f_support(&self) -> Vec<usize> {
        support(&self.f)
    }

    pub fn f_as_bipoly(&self) -> BiPoly {
        BiPoly::from_h_coeffs(&self.f)
    }

    /// Solves `s·g_i − r^i·g_i = f_i` coefficientwise.
    pub fn solve_conformal(&self) -> Result<ConformalWitness, ConformalError> {
        let s = self.spec.s();
        let mut g = Vec::with_capacity(self.f.len());
        for (i, fi) in self.f.iter().enumerate() {
            if fi.is_zero() {
                g.push(Scalar::zero());
                continue;
            }
            let denom = s.sub(&self.spec.power(Param::R, i as i64));
            let gi = fi.div(&denom).map_err(|_| ConformalError::NotConformal(i))?;
            g.push(gi);
        }
        Ok(ConformalWitness { g: trim(g) })
    }

    pub fn gwa_algebra(&self) -> Result<GwaAlgebra, ConformalError> {
        let g = self.solve_conformal()?.as_bipoly();
        Ok(GwaAlgebra::new(self.spec.clone(), g).expect("g depends on h only"))
    }

    pub fn translate_to_gwa(&self, expr: &Expr) -> Result<GwaElement, TranslateError> {
        let alg = self.gwa_algebra()?;
        Ok(evaluate(&alg, expr)?)
    }

    pub fn translate_text(&self, text: &str) -> Result<GwaElement, TranslateError> {
        let e = parse_expression(text, Alphabet::DownUp).map_err(ExprError::from)?;
        self.translate_to_gwa(&e)
    }
}

pub fn solve_conformal(p: &DownUpPresentation) -> Result<ConformalWitness, ConformalError> {
    p.solve_conformal()
}

pub fn translate_to_gwa(p: &DownUpPresentation, expr: &Expr) -> Result<GwaElement, TranslateError> {
    p.translate_to_gwa(expr)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl From<EvalError> for TranslateError {
    fn from(e: EvalError) -> Self {
        TranslateError::Expr(e.into())
    }
}

/// Evaluation into `L`; the down-up generators are sent to `x`, `y`, `h`.
impl ExprTarget for GwaAlgebra {
    type Elem = GwaElement;

    fn params(&self) -> Option<&ParamSpec> {
        Some(self.spec())
    }

    fn constant(&self, c: Scalar) -> GwaElement {
        GwaElement::scalar(c)
    }

    fn generator(&self, g: Generator) -> Result<GwaElement, EvalError> {
        Ok(match g {
            Generator::D | Generator::X => GwaElement::x(),
            Generator::U | Generator::Y => GwaElement::y(),
            Generator::H => GwaElement::h(),
            Generator::K => GwaElement::k(),
        })
    }

    fn add(&self, a: &GwaElement, b: &GwaElement) -> GwaElement {
        a.add(b)
    }

    fn mul(&self, a: &GwaElement, b: &GwaElement) -> GwaElement {
        GwaAlgebra::mul(self, a, b)
    }

    fn scale(&self, c: &Scalar, a: &GwaElement) -> GwaElement {
        a.scale(c)
    }
}

/// Parses and normalizes an element written with `x, y, h, k`.
pub fn parse_gwa_element(alg: &GwaAlgebra, text: &str) -> Result<GwaElement, ExprError> {
    let e = parse_expression(text, Alphabet::Gwa)?;
    Ok(evaluate(alg, &e)?)
}

/// The three defining relations of `L(f, r, s, 0)` as expressions in
/// `d, u, h`: `dh − rhd`, `hu − ruh`, `du − sud + f(h)`.
pub fn defining_relations(p: &DownUpPresentation) -> Vec<Expr> {
    let text_rel = ["d*h - r*h*d", "h*u - r*u*h", "d*u - s*u*d"];
    let mut rels: Vec<Expr> = text_rel
        .iter()
        .map(|t| parse_expression(t, Alphabet::DownUp).expect("static relation"))
        .collect();
    let f_of_h = p
        .f
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| scalar_times_h_power(c, i as u32))
        .reduce(|a, b| Expr::Add(Box::new(a), Box::new(b)));
    if let Some(fh) = f_of_h {
        let last = rels.pop().expect("three relations");
        rels.push(Expr::Add(Box::new(last), Box::new(fh)));
    }
    rels
}

fn scalar_times_h_power(c: &Scalar, i: u32) -> Expr {
    // The coefficient is embedded through its numerator and denominator.
    let num = poly_expr(c.numer());
    let den = poly_expr(c.denom());
    let coeff = Expr::Div(Box::new(num), Box::new(den));
    let h = Expr::Pow(Box::new(Expr::Gen(Generator::H)), i);
    Expr::Mul(Box::new(coeff), Box::new(h))
}

fn poly_expr(p: &crate::scalars::ZPoly) -> Expr {
    use crate::expr::ScalarSymbol;
    let mut acc: Option<Expr> = None;
    for (i, c) in p.coeffs().iter().enumerate() {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        let num = Expr::Int(c.numer().clone());
        let den = Expr::Int(c.denom().clone());
        let z = Expr::Pow(Box::new(Expr::Scalar(ScalarSymbol::Z)), i as u32);
        let term = Expr::Mul(Box::new(Expr::Div(Box::new(num), Box::new(den))), Box::new(z));
        acc = Some(match acc {
            None => term,
            Some(a) => Expr::Add(Box::new(a), Box::new(term)),
        });
    }
    acc.unwrap_or(Expr::Int(0.into()))
}
