//! The generalized Weyl algebra `L = R(k + g(h), φ)` with `R = ℚ(z)[h, k]`,
//! `φ(h) = rh`, `φ(k) = sk`.
//!
//! Elements are kept in the normal form `Σ_w p_w · v_w` where `v_w = x^w` for
//! `w > 0`, `v_w = y^{-w}` for `w < 0` and `v_0 = 1`, polynomials on the left.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::bipoly::BiPoly;
use crate::scalars::{ParamSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GwaError {
    #[error("g must be a polynomial in h alone, got {0}")]
    GDependsOnK(String),
}

/// Multiplication context: the parameters and the conformal polynomial `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GwaAlgebra {
    spec: ParamSpec,
    g: BiPoly,
}

/// The scalar `μ` of the degree-counting automorphism `σ_μ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coarseness {
    mu: Scalar,
}

impl Coarseness {
    pub fn of(spec: &ParamSpec) -> Self {
        Coarseness { mu: spec.mu() }
    }

    pub fn mu(&self) -> &Scalar {
        &self.mu
    }

    /// `μ^{-w}`, the factor `σ_μ` puts on `v_w`.
    pub fn weight_factor(&self, w: i64) -> Scalar {
        let base = if w >= 0 {
            self.mu.inv().expect("mu is nonzero")
        } else {
            self.mu.clone()
        };
        base.pow(w.unsigned_abs() as u32)
    }
}

/// A finite sum `Σ_w p_w · v_w` with every stored `p_w` nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GwaElement {
    components: BTreeMap<i64, BiPoly>,
}

impl GwaElement {
    pub fn zero() -> Self {
        GwaElement::default()
    }

    pub fn one() -> Self {
        Self::from_poly(BiPoly::one())
    }

    pub fn from_poly(p: BiPoly) -> Self {
        Self::homogeneous(p, 0)
    }

    /// `p · v_w`.
    pub fn homogeneous(p: BiPoly, w: i64) -> Self {
        let mut components = BTreeMap::new();
        if !p.is_zero() {
            components.insert(w, p);
        }
        GwaElement { components }
    }

    pub fn basis_word(w: i64) -> Self {
        Self::homogeneous(BiPoly::one(), w)
    }

    pub fn x() -> Self {
        Self::basis_word(1)
    }

    pub fn y() -> Self {
        Self::basis_word(-1)
    }

    pub fn h() -> Self {
        Self::from_poly(BiPoly::h())
    }

    pub fn k() -> Self {
        Self::from_poly(BiPoly::k())
    }

    pub fn scalar(c: Scalar) -> Self {
        Self::from_poly(BiPoly::constant(c))
    }

    pub fn components(&self) -> impl Iterator<Item = (i64, &BiPoly)> {
        self.components.iter().map(|(w, p)| (*w, p))
    }

    pub fn component(&self, w: i64) -> BiPoly {
        self.components.get(&w).cloned().unwrap_or_default()
    }

    pub fn weights(&self) -> Vec<i64> {
        self.components.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Whether the element lies in `R` (weight zero only).
    pub fn is_in_base(&self) -> bool {
        self.components.keys().all(|&w| w == 0)
    }

    fn add_component(&mut self, w: i64, p: &BiPoly) {
        if p.is_zero() {
            return;
        }
        let sum = match self.components.get(&w) {
            Some(old) => old.add(p),
            None => p.clone(),
        };
        if sum.is_zero() {
            self.components.remove(&w);
        } else {
            self.components.insert(w, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, p) in &other.components {
            out.add_component(*w, p);
        }
        out
    }

    pub fn neg(&self) -> Self {
        GwaElement {
            components: self.components.iter().map(|(w, p)| (*w, p.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        GwaElement {
            components: self.components.iter().map(|(w, p)| (*w, p.scale(c))).collect(),
        }
    }

    /// Multiplies every component on the left by a polynomial of `R`.
    pub fn left_mul_poly(&self, q: &BiPoly) -> Self {
        let mut out = Self::zero();
        for (w, p) in &self.components {
            out.add_component(*w, &q.mul(p));
        }
        out
    }
}

pub fn gwa_add(u: &GwaElement, v: &GwaElement) -> GwaElement {
    u.add(v)
}

pub fn gwa_scale(c: &Scalar, u: &GwaElement) -> GwaElement {
    u.scale(c)
}

pub fn basis_word(w: i64) -> GwaElement {
    GwaElement::basis_word(w)
}

pub fn from_poly(p: BiPoly) -> GwaElement {
    GwaElement::from_poly(p)
}

impl GwaAlgebra {
    pub fn new(spec: ParamSpec, g: BiPoly) -> Result<Self, GwaError> {
        if !g.is_h_only() {
            return Err(GwaError::GDependsOnK(g.to_string()));
        }
        Ok(GwaAlgebra { spec, g })
    }

    pub fn spec(&self) -> &ParamSpec {
        &self.spec
    }

    pub fn g(&self) -> &BiPoly {
        &self.g
    }

    pub fn coarseness(&self) -> Coarseness {
        Coarseness::of(&self.spec)
    }

    /// `a = k + g(h) = yx`.
    pub fn a(&self) -> BiPoly {
        BiPoly::k().add(&self.g)
    }

    /// `φ^i(a)`; for `i = 1` this is `sk + g(rh) = xy`.
    pub fn phi_a(&self, i: i64) -> BiPoly {
        self.a().apply_phi_power(&self.spec, i)
    }

    /// Coefficient `c` with `v_m · v_n = c · v_{m+n}`, obtained by cancelling
    /// one `xy` or `yx` pair at a time.
    pub fn word_product(&self, m: i64, n: i64) -> BiPoly {
        let mut coeff = BiPoly::one();
        let (mut m, mut n) = (m, n);
        loop {
            if m > 0 && n < 0 {
                // x^m y^n' = x^{m-1} φ(a) y^{n'-1} = φ^m(a) x^{m-1} y^{n'-1}
                coeff = coeff.mul(&self.phi_a(m));
                m -= 1;
                n += 1;
            } else if m < 0 && n > 0 {
                // y^m' x^n = y^{m'-1} a x^{n-1} = φ^{m+1}(a) y^{m'-1} x^{n-1}
                coeff = coeff.mul(&self.phi_a(m + 1));
                m += 1;
                n -= 1;
            } else {
                return coeff;
            }
        }
    }

    pub fn mul(&self, u: &GwaElement, v: &GwaElement) -> GwaElement {
        let mut out = GwaElement::zero();
        for (&m, p) in &u.components {
            for (&n, q) in &v.components {
                let shifted = q.apply_phi_power(&self.spec, m);
                let coeff = p.mul(&shifted).mul(&self.word_product(m, n));
                out.add_component(m + n, &coeff);
            }
        }
        out
    }

    pub fn pow(&self, u: &GwaElement, n: u32) -> GwaElement {
        let mut acc = GwaElement::one();
        for _ in 0..n {
            acc = self.mul(&acc, u);
        }
        acc
    }

    /// `σ_μ`: identity on `R`, `x ↦ μ^{-1}x`, `y ↦ μy`.
    pub fn apply_sigma_mu(&self, u: &GwaElement) -> GwaElement {
        apply_sigma_with(&self.coarseness(), u)
    }
}

/// Applies the degree-counting automorphism of the given coarseness.
pub fn apply_sigma_with(mu: &Coarseness, u: &GwaElement) -> GwaElement {
    GwaElement {
        components: u
            .components
            .iter()
            .map(|(&w, p)| (w, p.scale(&mu.weight_factor(w))))
            .collect(),
    }
}

pub fn gwa_mul(alg: &GwaAlgebra, u: &GwaElement, v: &GwaElement) -> GwaElement {
    alg.mul(u, v)
}

pub fn apply_sigma_mu(alg: &GwaAlgebra, u: &GwaElement) -> GwaElement {
    alg.apply_sigma_mu(u)
}

impl fmt::Display for GwaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (&w, p)) in self.components.iter().enumerate() {
            if n > 0 {
                let text = p.to_string();
                match text.strip_prefix('-') {
                    Some(rest) if w == 0 && p.len() == 1 => {
                        write!(f, " - {rest}")?;
                        continue;
                    }
                    Some(_) if w == 0 => {
                        write!(f, " + ({text})")?;
                        continue;
                    }
                    _ => write!(f, " + ")?,
                }
            }
            let word = match w {
                0 => String::new(),
                1 => "x".to_string(),
                -1 => "y".to_string(),
                w if w > 0 => format!("x^{w}"),
                w => format!("y^{}", -w),
            };
            if w == 0 {
                write!(f, "{p}")?;
            } else if p.is_one() {
                write!(f, "{word}")?;
            } else {
                let text = p.to_string();
                if p.len() == 1 && !text.starts_with('-') && !text.contains(' ') {
                    write!(f, "{text}*{word}")?;
                } else {
                    write!(f, "({text})*{word}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg() -> GwaAlgebra {
        let g = BiPoly::h().pow(2).add(&BiPoly::constant(Scalar::from_int(3)));
        GwaAlgebra::new(ParamSpec::new(1, 2, 3).unwrap(), g).unwrap()
    }

    #[test]
    fn defining_products() {
        let a = alg();
        let (x, y) = (GwaElement::x(), GwaElement::y());
        let s = a.spec().s();
        let xy = BiPoly::k().scale(&s).add(&a.g().scale_h(a.spec(), 1));
        assert_eq!(a.mul(&x, &y), GwaElement::from_poly(xy));
        assert_eq!(a.mul(&y, &x), GwaElement::from_poly(a.a()));
        let xh = a.mul(&x, &GwaElement::h());
        assert_eq!(xh, GwaElement::homogeneous(BiPoly::monomial(Scalar::z_pow(2), 1, 0), 1));
    }

    #[test]
    fn small_associativity() {
        let a = alg();
        let (x, y) = (GwaElement::x(), GwaElement::y());
        assert_eq!(a.mul(&a.mul(&x, &y), &x), a.mul(&x, &a.mul(&y, &x)));
    }

    #[test]
    fn add_and_scale() {
        let x = GwaElement::x();
        assert!(x.add(&x.scale(&Scalar::from_int(-1))).is_zero());
        assert!(x.scale(&Scalar::zero()).is_zero());
        let hx = GwaElement::homogeneous(BiPoly::h(), 1);
        let kx = GwaElement::homogeneous(BiPoly::k(), 1);
        assert_eq!(gwa_add(&hx, &kx), GwaElement::homogeneous(BiPoly::h().add(&BiPoly::k()), 1));
    }

    #[test]
    fn sigma_examples() {
        let a = alg();
        let mu_inv = a.spec().mu_inv();
        assert_eq!(a.apply_sigma_mu(&GwaElement::x()), GwaElement::x().scale(&mu_inv));
        let hk = GwaElement::from_poly(BiPoly::monomial(Scalar::one(), 1, 1));
        assert_eq!(a.apply_sigma_mu(&hk), hk);
        let y2 = basis_word(-2);
        assert_eq!(a.apply_sigma_mu(&y2), y2.scale(&a.spec().mu().pow(2)));
    }

    #[test]
    fn constructors() {
        let a = alg();
        assert_eq!(basis_word(1), GwaElement::x());
        assert_eq!(basis_word(-2), a.mul(&GwaElement::y(), &GwaElement::y()));
        assert_eq!(from_poly(a.a()), a.mul(&GwaElement::y(), &GwaElement::x()));
    }

    #[test]
    fn word_product_closed_form() {
        // x^2 y^2 = φ^2(a) φ(a)
        let a = alg();
        assert_eq!(a.word_product(2, -2), a.phi_a(2).mul(&a.phi_a(1)));
        // y^2 x^3 = φ^{-1}(a) a · x
        assert_eq!(a.word_product(-2, 3), a.phi_a(-1).mul(&a.phi_a(0)));
        assert!(a.word_product(3, 2).is_one());
    }

    #[test]
    fn rejects_g_with_k() {
        let spec = ParamSpec::new(1, 2, 3).unwrap();
        assert!(GwaAlgebra::new(spec, BiPoly::k()).is_err());
    }

    #[test]
    fn display() {
        let u = GwaElement::homogeneous(BiPoly::h().add(&BiPoly::k()), -2)
            .add(&GwaElement::x())
            .add(&GwaElement::k());
        assert_eq!(u.to_string(), "(k + h)*y^2 + k + x");
        let v = GwaElement::y().scale(&Scalar::from_int(-2));
        assert_eq!(v.add(&GwaElement::scalar(Scalar::from_int(-1))).to_string(), "(-2)*y - 1");
        let w = GwaElement::h().add(&GwaElement::one()).neg();
        assert_eq!(GwaElement::y().add(&w).to_string(), "y + (-1 - h)");
    }
}
