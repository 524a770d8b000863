//! Brute-force reference engine. Words in the free algebra on `x, y, h, k`
//! are rewritten with the defining relations of `L` until no rule applies:
//!
//! ```text
//! x y -> s k + g(rh)      y x -> k + g(h)
//! x h -> r h x            x k -> s k x
//! y h -> r^-1 h y         y k -> s^-1 k y
//! k h -> h k
//! ```
//!
//! Irreducible words have the shape `h^i k^j x^w` or `h^i k^j y^w`. Nothing
//! here calls into the closed-form machinery of [`crate::gwa`]; the only
//! shared pieces are the scalar field and the output container.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bipoly::{BiPoly, Support};
use crate::expr::{evaluate, parse_expression, Alphabet, EvalError, ExprError, ExprTarget, Generator};
use crate::gwa::{GwaAlgebra, GwaElement};
use crate::scalars::{Param, ParamSpec, Scalar};

pub const DEFAULT_LENGTH_BOUND: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X,
    Y,
    H,
    K,
}

pub type FreeWord = Vec<Letter>;

/// A finite linear combination of free words.
pub type FreeCombination = BTreeMap<FreeWord, Scalar>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("length bound exceeded: word of length {len} > {bound}")]
    LengthBoundExceeded { len: usize, bound: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

fn add_into(map: &mut FreeCombination, word: FreeWord, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let sum = match map.remove(&word) {
        Some(old) => old.add(&c),
        None => c,
    };
    if !sum.is_zero() {
        map.insert(word, sum);
    }
}

pub fn word_of(letters: &[Letter]) -> FreeCombination {
    let mut m = FreeCombination::new();
    m.insert(letters.to_vec(), Scalar::one());
    m
}

/// The rewriting system attached to a fixed algebra.
pub struct Rewriter {
    r: Scalar,
    s: Scalar,
    r_inv: Scalar,
    s_inv: Scalar,
    /// `(i, g_i)` for the nonzero coefficients of `g`.
    g: Vec<(u32, Scalar)>,
    spec: ParamSpec,
}

impl Rewriter {
    pub fn new(alg: &GwaAlgebra) -> Self {
        let spec = alg.spec().clone();
        let g = alg
            .g()
            .terms()
            .map(|(&(i, _), c)| (i, c.clone()))
            .collect();
        Rewriter {
            r: spec.power(Param::R, 1),
            s: spec.power(Param::S, 1),
            r_inv: spec.power(Param::R, -1),
            s_inv: spec.power(Param::S, -1),
            g,
            spec,
        }
    }

    fn g_terms(&self, scale_h: bool) -> Vec<(FreeWord, Scalar)> {
        self.g
            .iter()
            .map(|(i, c)| {
                let c = if scale_h { c.mul(&self.r.pow(*i)) } else { c.clone() };
                (vec![Letter::H; *i as usize], c)
            })
            .collect()
    }

    /// Right-hand side of the rule for an adjacent pair, if any.
    fn rule(&self, a: Letter, b: Letter) -> Option<Vec<(FreeWord, Scalar)>> {
        use Letter::*;
        Some(match (a, b) {
            (X, Y) => {
                let mut out = vec![(vec![K], self.s.clone())];
                out.extend(self.g_terms(true));
                out
            }
            (Y, X) => {
                let mut out = vec![(vec![K], Scalar::one())];
                out.extend(self.g_terms(false));
                out
            }
            (X, H) => vec![(vec![H, X], self.r.clone())],
            (X, K) => vec![(vec![K, X], self.s.clone())],
            (Y, H) => vec![(vec![H, Y], self.r_inv.clone())],
            (Y, K) => vec![(vec![K, Y], self.s_inv.clone())],
            (K, H) => vec![(vec![H, K], Scalar::one())],
            _ => return None,
        })
    }

    fn find_redex(&self, w: &[Letter], strategy: Strategy) -> Option<usize> {
        let reducible = |i: &usize| self.rule(w[*i], w[*i + 1]).is_some();
        let n = w.len().saturating_sub(1);
        match strategy {
            Strategy::Leftmost => (0..n).find(reducible),
            Strategy::Rightmost => (0..n).rev().find(reducible),
        }
    }

    /// Rewrites until every word is irreducible.
    pub fn reduce(&self, input: &FreeCombination, strategy: Strategy) -> FreeCombination {
        let mut pending = input.clone();
        let mut done = FreeCombination::new();
        while let Some((word, c)) = pending.pop_first() {
            match self.find_redex(&word, strategy) {
                None => add_into(&mut done, word, c),
                Some(i) => {
                    let rhs = self.rule(word[i], word[i + 1]).expect("redex has a rule");
                    for (rep, rc) in rhs {
                        let mut next = word[..i].to_vec();
                        next.extend(rep);
                        next.extend_from_slice(&word[i + 2..]);
                        add_into(&mut pending, next, c.mul(&rc));
                    }
                }
            }
        }
        done
    }

    pub fn spec(&self) -> &ParamSpec {
        &self.spec
    }
}

/// Reads an irreducible combination as a normal-form element.
fn to_element(irreducible: &FreeCombination) -> GwaElement {
    let mut out = GwaElement::zero();
    for (word, c) in irreducible {
        let count = |l: Letter| word.iter().filter(|&&x| x == l).count();
        let w = count(Letter::X) as i64 - count(Letter::Y) as i64;
        let mono = BiPoly::monomial(c.clone(), count(Letter::H) as u32, count(Letter::K) as u32);
        out = out.add(&GwaElement::homogeneous(mono, w));
    }
    out
}

pub fn oracle_normalize_with(
    alg: &GwaAlgebra,
    t: &FreeCombination,
    strategy: Strategy,
    bound: usize,
) -> Result<GwaElement, OracleError> {
    if let Some(len) = t.keys().map(Vec::len).find(|&len| len > bound) {
        return Err(OracleError::LengthBoundExceeded { len, bound });
    }
    Ok(to_element(&Rewriter::new(alg).reduce(t, strategy)))
}

pub fn oracle_normalize(alg: &GwaAlgebra, t: &FreeCombination) -> Result<GwaElement, OracleError> {
    oracle_normalize_with(alg, t, Strategy::Leftmost, DEFAULT_LENGTH_BOUND)
}

/// Expands an expression into the free algebra without applying any relation.
struct FreeRing<'a> {
    spec: &'a ParamSpec,
}

impl ExprTarget for FreeRing<'_> {
    type Elem = FreeCombination;

    fn params(&self) -> Option<&ParamSpec> {
        Some(self.spec)
    }

    fn constant(&self, c: Scalar) -> FreeCombination {
        let mut m = FreeCombination::new();
        add_into(&mut m, Vec::new(), c);
        m
    }

    fn generator(&self, g: Generator) -> Result<FreeCombination, EvalError> {
        let l = match g {
            Generator::D | Generator::X => Letter::X,
            Generator::U | Generator::Y => Letter::Y,
            Generator::H => Letter::H,
            Generator::K => Letter::K,
        };
        Ok(word_of(&[l]))
    }

    fn add(&self, a: &FreeCombination, b: &FreeCombination) -> FreeCombination {
        let mut out = a.clone();
        for (w, c) in b {
            add_into(&mut out, w.clone(), c.clone());
        }
        out
    }

    fn mul(&self, a: &FreeCombination, b: &FreeCombination) -> FreeCombination {
        let mut out = FreeCombination::new();
        for (wa, ca) in a {
            for (wb, cb) in b {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                add_into(&mut out, w, ca.mul(cb));
            }
        }
        out
    }

    fn scale(&self, c: &Scalar, a: &FreeCombination) -> FreeCombination {
        let mut out = FreeCombination::new();
        for (w, x) in a {
            add_into(&mut out, w.clone(), x.mul(c));
        }
        out
    }
}

pub fn expand_expression(spec: &ParamSpec, text: &str, alphabet: Alphabet) -> Result<FreeCombination, ExprError> {
    let e = parse_expression(text, alphabet)?;
    Ok(evaluate(&FreeRing { spec }, &e)?)
}

pub fn oracle_normalize_text(alg: &GwaAlgebra, text: &str, alphabet: Alphabet) -> Result<GwaElement, OracleError> {
    let t = expand_expression(alg.spec(), text, alphabet)?;
    oracle_normalize(alg, &t)
}

/// `φ^w(p)` by substituting `h ↦ r^{±1}h`, `k ↦ s^{±1}k` one step at a time.
pub fn phi_by_substitution(spec: &ParamSpec, p: &BiPoly, w: i64) -> BiPoly {
    let step = w.signum();
    let h_img = BiPoly::monomial(spec.power(Param::R, step), 1, 0);
    let k_img = BiPoly::monomial(spec.power(Param::S, step), 0, 1);
    let mut cur = p.clone();
    for _ in 0..w.abs() {
        cur = cur
            .terms()
            .map(|(&(i, j), c)| h_img.pow(i).mul(&k_img.pow(j)).scale(c))
            .fold(BiPoly::zero(), |acc, t| acc.add(&t));
    }
    cur
}

/// Rank of a dense matrix over ℚ(z) by Gaussian elimination.
fn rank(mut rows: Vec<Vec<Scalar>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].inv().expect("nonzero pivot");
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].mul(&inv);
            let pivot_row = rows[rank].clone();
            for (x, p) in rows[r].iter_mut().zip(&pivot_row).skip(col) {
                *x = x.sub(&p.mul(&factor));
            }
        }
        rank += 1;
    }
    rank
}

/// Whether `c0 = μ^{-1}·p − φ(p)` has a solution `p` supported on `support`,
/// decided by comparing ranks of the coefficient matrix and its augmentation.
pub fn inner_system_solvable(spec: &ParamSpec, support: &Support, c0: &BiPoly) -> bool {
    let unknowns: Vec<_> = support.iter().copied().collect();
    let images: Vec<BiPoly> = unknowns
        .iter()
        .map(|&(i, j)| {
            let m = BiPoly::monomial(Scalar::one(), i, j);
            m.scale(&spec.mu_inv()).sub(&phi_by_substitution(spec, &m, 1))
        })
        .collect();
    let mut monomials: Support = c0.support();
    for img in &images {
        monomials.extend(img.support());
    }
    let matrix: Vec<Vec<Scalar>> = monomials
        .iter()
        .map(|&(i, j)| images.iter().map(|img| img.coeff(i, j)).collect())
        .collect();
    let augmented: Vec<Vec<Scalar>> = monomials
        .iter()
        .zip(&matrix)
        .map(|(&(i, j), row)| {
            let mut row = row.clone();
            row.push(c0.coeff(i, j));
            row
        })
        .collect();
    rank(matrix) == rank(augmented)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg() -> GwaAlgebra {
        let g = BiPoly::h().pow(2).add(&BiPoly::constant(Scalar::from_int(2)));
        GwaAlgebra::new(ParamSpec::new(1, 2, 3).unwrap(), g).unwrap()
    }

    #[test]
    fn rewriting_examples() {
        let alg = alg();
        let spec = alg.spec().clone();
        let xy = oracle_normalize(&alg, &word_of(&[Letter::X, Letter::Y])).unwrap();
        let expect = BiPoly::k().scale(&spec.s()).add(&alg.g().scale_h(&spec, 1));
        assert_eq!(xy, GwaElement::from_poly(expect.clone()));

        let hx = oracle_normalize(&alg, &word_of(&[Letter::H, Letter::X])).unwrap();
        assert_eq!(hx, GwaElement::homogeneous(BiPoly::h(), 1));

        // x h y -> r h x y -> r h (s k + g(rh))
        let xhy = oracle_normalize(&alg, &word_of(&[Letter::X, Letter::H, Letter::Y])).unwrap();
        assert_eq!(xhy, GwaElement::from_poly(BiPoly::h().scale(&spec.r()).mul(&expect)));
    }

    #[test]
    fn text_input() {
        let alg = alg();
        let a = oracle_normalize_text(&alg, "u*d", Alphabet::DownUp).unwrap();
        assert_eq!(a, GwaElement::from_poly(alg.a()));
        let z = oracle_normalize_text(&alg, "x*h - r*h*x", Alphabet::Gwa).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn length_bound() {
        let alg = alg();
        let long = word_of(&[Letter::X; 9]);
        assert_eq!(
            oracle_normalize(&alg, &long),
            Err(OracleError::LengthBoundExceeded { len: 9, bound: 8 })
        );
        assert!(oracle_normalize_with(&alg, &long, Strategy::Leftmost, 9).is_ok());
    }

    #[test]
    fn strategies_agree_on_a_sample() {
        let alg = alg();
        use Letter::*;
        let w = word_of(&[Y, K, X, H, X, Y]);
        let left = oracle_normalize_with(&alg, &w, Strategy::Leftmost, 8).unwrap();
        let right = oracle_normalize_with(&alg, &w, Strategy::Rightmost, 8).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn phi_substitution_round_trip() {
        let spec = ParamSpec::new(2, -3, 5).unwrap();
        let p = BiPoly::h().pow(2).mul(&BiPoly::k()).add(&BiPoly::k().scale(&Scalar::from_int(7)));
        let there = phi_by_substitution(&spec, &p, 3);
        assert_eq!(phi_by_substitution(&spec, &there, -3), p);
        assert_eq!(there, p.apply_phi_power(&spec, 3));
    }

    #[test]
    fn inner_system() {
        let spec = ParamSpec::new(1, 2, 5).unwrap();
        let bad = BiPoly::monomial(Scalar::one(), 2, 1);
        assert!(!inner_system_solvable(&spec, &bad.support(), &bad));
        let good = BiPoly::monomial(Scalar::one(), 1, 1);
        assert!(inner_system_solvable(&spec, &good.support(), &good));
    }
}
