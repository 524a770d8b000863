//! Sparse polynomials in `h` and `k` over ℚ(z), the base ring `R` of the
//! generalized Weyl algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::expr::{evaluate, parse_expression, Alphabet, EvalError, ExprError, ExprTarget, Generator};
use crate::scalars::{Param, ParamSpec, Scalar};

/// Exponent pair `(i, j)` of the monomial `h^i k^j`.
pub type Exponent = (u32, u32);

/// Set of exponent pairs carrying a nonzero coefficient.
pub type Support = BTreeSet<Exponent>;

/// A polynomial `Σ c_{ij} h^i k^j`. Zero coefficients are never stored, so the
/// zero polynomial is the empty map and equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct BiPoly {
    terms: BTreeMap<Exponent, Scalar>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Scalar, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BiPoly { terms }
    }

    pub fn h() -> Self {
        Self::monomial(Scalar::one(), 1, 0)
    }

    pub fn k() -> Self {
        Self::monomial(Scalar::one(), 0, 1)
    }

    /// Polynomial in `h` alone from dense coefficients, constant term first.
    pub fn from_h_coeffs(coeffs: &[Scalar]) -> Self {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (i as u32, 0, c.clone()))
            .collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Scalar {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(0, 0).is_one()
    }

    /// True when no term involves `k`.
    pub fn is_h_only(&self) -> bool {
        self.terms.keys().all(|&(_, j)| j == 0)
    }

    pub fn degree_in_k(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    fn add_term(&mut self, e: Exponent, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let sum = old.add(c);
                if sum.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        BiPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, &c.neg());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = BiPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term((i1 + i2, j1 + j2), &c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return BiPoly::zero();
        }
        BiPoly {
            terms: self.terms.iter().map(|(e, x)| (*e, x.mul(c))).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = BiPoly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn arith(&self, other: &Self, op: PolyOp) -> Self {
        match op {
            PolyOp::Add => self.add(other),
            PolyOp::Sub => self.sub(other),
            PolyOp::Mul => self.mul(other),
        }
    }

    /// `φ^w(p) = p(r^w h, s^w k)`.
    pub fn apply_phi_power(&self, spec: &ParamSpec, w: i64) -> Self {
        if w == 0 {
            return self.clone();
        }
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| {
                    let e = spec.rs_exponent(i as i64, j as i64) * w;
                    ((i, j), c.mul(&Scalar::z_pow(e)))
                })
                .collect(),
        }
    }

    /// `p(r^{e}h, k)` for a polynomial in `h` alone; used for `g(rh)`.
    pub fn scale_h(&self, spec: &ParamSpec, e: i64) -> Self {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((i, j), c.mul(&spec.power(Param::R, e * i as i64))))
                .collect(),
        }
    }

    pub fn support(&self) -> Support {
        self.terms.keys().copied().collect()
    }

    /// Divides by `k + g(h)` treating `self` as a polynomial in `k` over
    /// ℚ(z)[h]. Returns `None` when the remainder is nonzero.
    pub fn exact_divide_by_a(&self, g: &BiPoly) -> Option<BiPoly> {
        assert!(g.is_h_only(), "g must not depend on k");
        let mut rem = self.clone();
        let mut quot = BiPoly::zero();
        while let Some(top) = rem.degree_in_k().filter(|&m| m > 0) {
            let lead: BiPoly = rem
                .terms
                .iter()
                .filter(|(&(_, j), _)| j == top)
                .map(|(&(i, _), c)| (i, top - 1, c.clone()))
                .collect();
            let divisor = BiPoly::k().add(g);
            rem = rem.sub(&lead.mul(&divisor));
            quot = quot.add(&lead);
        }
        rem.is_zero().then_some(quot)
    }
}

pub fn poly_arith(p: &BiPoly, q: &BiPoly, op: PolyOp) -> BiPoly {
    p.arith(q, op)
}

pub fn apply_phi_power(spec: &ParamSpec, p: &BiPoly, w: i64) -> BiPoly {
    p.apply_phi_power(spec, w)
}

pub fn exact_divide_by_a(p: &BiPoly, g: &BiPoly) -> Option<BiPoly> {
    p.exact_divide_by_a(g)
}

pub fn support_of(p: &BiPoly) -> Support {
    p.support()
}

impl FromIterator<(u32, u32, Scalar)> for BiPoly {
    fn from_iter<T: IntoIterator<Item = (u32, u32, Scalar)>>(iter: T) -> Self {
        let mut out = BiPoly::zero();
        for (i, j, c) in iter {
            out.add_term((i, j), &c);
        }
        out
    }
}

impl From<Scalar> for BiPoly {
    fn from(c: Scalar) -> Self {
        BiPoly::constant(c)
    }
}

/// Evaluation context for expressions in `h` and `k` only.
struct BaseRing<'a> {
    params: Option<&'a ParamSpec>,
}

impl ExprTarget for BaseRing<'_> {
    type Elem = BiPoly;

    fn params(&self) -> Option<&ParamSpec> {
        self.params
    }

    fn constant(&self, c: Scalar) -> BiPoly {
        BiPoly::constant(c)
    }

    fn generator(&self, g: Generator) -> Result<BiPoly, EvalError> {
        match g {
            Generator::H => Ok(BiPoly::h()),
            Generator::K => Ok(BiPoly::k()),
            other => Err(EvalError::Generator(other.symbol())),
        }
    }

    fn add(&self, a: &BiPoly, b: &BiPoly) -> BiPoly {
        a.add(b)
    }

    fn mul(&self, a: &BiPoly, b: &BiPoly) -> BiPoly {
        a.mul(b)
    }

    fn scale(&self, c: &Scalar, a: &BiPoly) -> BiPoly {
        a.scale(c)
    }
}

/// Parses a polynomial such as `3*h^2*k - (z + 1)*k`. The scalar symbols
/// `r`, `s`, `mu` resolve only when `params` is given.
pub fn parse_bipoly(text: &str, params: Option<&ParamSpec>) -> Result<BiPoly, ExprError> {
    let e = parse_expression(text, Alphabet::Gwa)?;
    Ok(evaluate(&BaseRing { params }, &e)?)
}

/// Writes a coefficient followed by `*` unless it is one; the sign is
/// written by the caller.
fn write_coeff_prefix(f: &mut fmt::Formatter<'_>, c: &Scalar, has_monomial: bool) -> fmt::Result {
    if has_monomial && c.is_one() {
        return Ok(());
    }
    if c.is_atomic() {
        write!(f, "{c}")?;
    } else {
        write!(f, "({c})")?;
    }
    if has_monomial {
        write!(f, "*")?;
    }
    Ok(())
}

fn write_monomial(f: &mut fmt::Formatter<'_>, i: u32, j: u32) -> fmt::Result {
    let mut parts = Vec::new();
    for (var, e) in [("h", i), ("k", j)] {
        match e {
            0 => {}
            1 => parts.push(var.to_string()),
            _ => parts.push(format!("{var}^{e}")),
        }
    }
    write!(f, "{}", parts.join("*"))
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().enumerate() {
            let negated = c.neg();
            let (sign, shown) = if !c.is_atomic() && negated.is_atomic() {
                ("-", negated)
            } else {
                ("+", c.clone())
            };
            match (n, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                (_, s) => write!(f, " {s} ")?,
            }
            write_coeff_prefix(f, &shown, i + j > 0)?;
            write_monomial(f, i, j)?;
        }
        Ok(())
    }
}
