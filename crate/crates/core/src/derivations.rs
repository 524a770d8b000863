//! `σ_μ`-skew derivations of `L`: the weight-zero c-type family with its
//! innerness equation, the nonzero-weight α-type family with its index sets,
//! and the admissibility test for weight-zero α-type data.
//!
//! A derivation is stored by its values on the generators: a twisted
//! derivation `α_w` of `R` for each weight (times `v_w`) plus `∂(x)` and
//! `∂(y)`. Everything else follows from the Leibniz rule
//! `∂(ab) = ∂(a)σ_μ(b) + a∂(b)`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::bipoly::{parse_bipoly, BiPoly};
use crate::expr::{eval_scalar, parse_expression, Alphabet, ExprError};
use crate::gwa::{apply_sigma_with, Coarseness, GwaAlgebra, GwaElement};
use crate::scalars::{ParamSpec, Scalar};

/// Solutions `t ∈ ℕ` of an exponent condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IndexSet {
    Empty,
    /// Sorted, duplicate free.
    Finite(Vec<u64>),
    /// `{t ≥ threshold : t ≡ offset (mod modulus)}`; `threshold` is itself a
    /// member and `offset < modulus`.
    Progression { offset: u64, modulus: u64, threshold: u64 },
}

impl IndexSet {
    pub fn contains(&self, t: u64) -> bool {
        match self {
            IndexSet::Empty => false,
            IndexSet::Finite(v) => v.binary_search(&t).is_ok(),
            IndexSet::Progression {
                offset,
                modulus,
                threshold,
            } => t >= *threshold && t % modulus == *offset,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, IndexSet::Empty)
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, IndexSet::Progression { .. })
    }

    /// Members `≤ bound`.
    pub fn elements_up_to(&self, bound: u64) -> Vec<u64> {
        (0..=bound).filter(|&t| self.contains(t)).collect()
    }

    fn from_sorted(v: Vec<u64>) -> Self {
        if v.is_empty() {
            IndexSet::Empty
        } else {
            IndexSet::Finite(v)
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexSet::Empty => write!(f, "∅"),
            IndexSet::Finite(v) => {
                let items: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            IndexSet::Progression {
                offset,
                modulus,
                threshold,
            } => match (*modulus, *threshold) {
                (1, 0) => write!(f, "N"),
                (1, t) => write!(f, "{{t in N : t >= {t}}}"),
                (m, t) => write!(f, "{{t in N : t >= {t}, t = {offset} mod {m}}}"),
            },
        }
    }
}

/// `{t ∈ ℕ : (a + b·t)/d ∈ ℕ}` for `b ≠ 0`, `d ≥ 1`.
fn natural_solutions(a: i64, b: i64, d: i64) -> IndexSet {
    let (a, b, d) = (a as i128, b as i128, d as i128);
    // b·t ≡ −a (mod d)
    let g = b.abs().gcd(&d);
    let rhs = (-a).mod_floor(&d);
    if rhs % g != 0 {
        return IndexSet::Empty;
    }
    let modulus = d / g;
    let residue = if modulus == 1 {
        0
    } else {
        let bm = (b / g).mod_floor(&modulus);
        let inv = bm.extended_gcd(&modulus).x.mod_floor(&modulus);
        ((rhs / g) * inv).mod_floor(&modulus)
    };
    if b > 0 {
        // a + b·t ≥ 0  ⇔  t ≥ ⌈−a/b⌉
        let lower = Integer::div_ceil(&(-a), &b).max(0);
        let first = lower + (residue - lower).mod_floor(&modulus);
        IndexSet::Progression {
            offset: residue as u64,
            modulus: modulus as u64,
            threshold: first as u64,
        }
    } else {
        // a − |b|·t ≥ 0  ⇔  t ≤ ⌊a/|b|⌋
        let upper = Integer::div_floor(&a, &(-b));
        if upper < 0 {
            return IndexSet::Empty;
        }
        let v = (residue..=upper)
            .step_by(modulus as usize)
            .map(|t| t as u64)
            .collect();
        IndexSet::from_sorted(v)
    }
}

fn natural_exponent(num: i64, d: i64) -> Option<u32> {
    (num >= 0 && num % d == 0).then(|| (num / d) as u32)
}

/// Exponent of `k` in the `h^i` term of `α_w(h)`: `b2 + (1 − i)·b1`.
pub fn alpha_h_exponent(spec: &ParamSpec, i: u64) -> Option<u32> {
    natural_exponent(spec.n2() + (1 - i as i64) * spec.n1(), spec.d())
}

/// Exponent of `k` in the `h^m` term of `α_w(k)`: `b2 − m·b1 + 1`.
pub fn alpha_k_exponent(spec: &ParamSpec, m: u64) -> Option<u32> {
    natural_exponent(spec.n2() - m as i64 * spec.n1() + spec.d(), spec.d())
}

/// The index sets `I_b` (for `α_w(h)`) and `J_b` (for `α_w(k)`).
pub fn index_sets(spec: &ParamSpec) -> (IndexSet, IndexSet) {
    let (d, n1, n2) = (spec.d(), spec.n1(), spec.n2());
    let i_set = natural_solutions(n2 + n1, -n1, d);
    let j_set = natural_solutions(n2 + d, -n1, d);
    (i_set, j_set)
}

/// Indices `t` with `b2 − t·b1 ∈ ℕ`, i.e. the admissible monomials
/// `h^t k^{b2 − t·b1}` of a multiplier in [`AlphaSpec::from_multiplier`].
pub fn multiplier_indices(spec: &ParamSpec) -> IndexSet {
    natural_solutions(spec.n2(), -spec.n1(), spec.d())
}

/// Branches of the closed-form table for positive integral `b1`, `b2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableCase {
    pub b1: u64,
    pub b2: u64,
    /// Quotient and remainder of `b2` by `b1`.
    pub q: u64,
    pub rho: u64,
    pub i_branch: &'static str,
    pub j_branch: &'static str,
    pub i_predicted: Vec<u64>,
    pub j_predicted: Vec<u64>,
}

/// Classifies `spec` against the table when `b1` and `b2` are positive
/// integers; `None` otherwise.
pub fn table_case(spec: &ParamSpec) -> Option<TableCase> {
    let (d, n1, n2) = (spec.d(), spec.n1(), spec.n2());
    if n1 <= 0 || n2 <= 0 || n1 % d != 0 || n2 % d != 0 {
        return None;
    }
    let (b1, b2) = ((n1 / d) as u64, (n2 / d) as u64);
    let (q, rho) = b2.div_rem(&b1);
    let (i_branch, i_predicted) = match b1.cmp(&b2) {
        std::cmp::Ordering::Greater => ("b1>b2", vec![0, 1]),
        std::cmp::Ordering::Equal => ("b1=b2", vec![0, 1, 2]),
        std::cmp::Ordering::Less => ("b1<b2", (0..=q + 1).collect()),
    };
    let (j_branch, j_predicted) = if b1 > b2 + 1 {
        ("b1>b2+1", vec![0])
    } else if b1 == b2 + 1 {
        ("b1=b2+1", vec![0, 1])
    } else if b1 == b2 {
        ("b1=b2", vec![0, 1])
    } else {
        let delta = u64::from(rho == b1 - 1);
        ("b1<b2", (0..=q + delta).collect())
    };
    Some(TableCase {
        b1,
        b2,
        q,
        rho,
        i_branch,
        j_branch,
        i_predicted,
        j_predicted,
    })
}

/// Whether a nonzero `c_w ∈ R` with `b·c_w = c_w·φ^w(b)` for all `b ∈ R` can
/// exist; in the commutative domain `R` this forces `φ^w = id`.
pub fn c_type_admissible(spec: &ParamSpec, w: i64) -> bool {
    spec.rs_exponent(1, 0) * w == 0 && spec.rs_exponent(0, 1) * w == 0
}

/// A `φ^w`-twisted derivation of `R`, determined by its values on `h`, `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwistedDerivation {
    pub w: i64,
    pub on_h: BiPoly,
    pub on_k: BiPoly,
}

impl TwistedDerivation {
    /// Extends the generator values by `α(pq) = α(p)φ^w(q) + pα(q)`, factoring
    /// each monomial as `h^i · k^j`.
    pub fn apply(&self, spec: &ParamSpec, p: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i, j), c) in p.terms() {
            let h_part = self.power_value(spec, &BiPoly::h(), &self.on_h, i);
            let k_part = self.power_value(spec, &BiPoly::k(), &self.on_k, j);
            let twisted_k = BiPoly::k().apply_phi_power(spec, self.w).pow(j);
            let mono = h_part
                .mul(&twisted_k)
                .add(&BiPoly::h().pow(i).mul(&k_part));
            out = out.add(&mono.scale(c));
        }
        out
    }

    /// `α(t^n) = Σ_{l<n} t^l α(t) φ^w(t)^{n−1−l}`.
    fn power_value(&self, spec: &ParamSpec, t: &BiPoly, value: &BiPoly, n: u32) -> BiPoly {
        let twisted = t.apply_phi_power(spec, self.w);
        (0..n).fold(BiPoly::zero(), |acc, l| {
            acc.add(&t.pow(l).mul(value).mul(&twisted.pow(n - 1 - l)))
        })
    }

    /// Whether the generator values respect `hk = kh`:
    /// `α(h)(φ^w(k) − k) = α(k)(φ^w(h) − h)`.
    pub fn is_consistent(&self, spec: &ParamSpec) -> bool {
        let dk = BiPoly::k().apply_phi_power(spec, self.w).sub(&BiPoly::k());
        let dh = BiPoly::h().apply_phi_power(spec, self.w).sub(&BiPoly::h());
        self.on_h.mul(&dk) == self.on_k.mul(&dh)
    }

    fn is_zero(&self) -> bool {
        self.on_h.is_zero() && self.on_k.is_zero()
    }
}

/// c-type data: `∂(x) = c0·x`, vanishing on `R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CTypeSpec {
    pub c0: BiPoly,
}

/// α-type data of weight `w ≠ 0`: `α_w(h) = Σ_{i} α_{h,i} h^i k^{b2+(1−i)b1}`
/// and `α_w(k) = Σ_{m} α_{k,m} h^m k^{b2−m·b1+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlphaSpec {
    pub w: i64,
    pub coeffs_h: BTreeMap<u64, Scalar>,
    pub coeffs_k: BTreeMap<u64, Scalar>,
}

impl AlphaSpec {
    /// The generator values, or the first key whose exponent is not a natural
    /// number.
    pub fn values(&self, spec: &ParamSpec) -> Result<(BiPoly, BiPoly), DerivationError> {
        let mut on_h = BiPoly::zero();
        for (&i, c) in &self.coeffs_h {
            let e = alpha_h_exponent(spec, i).ok_or(DerivationError::SupportViolation {
                generator: 'h',
                index: i,
            })?;
            on_h = on_h.add(&BiPoly::monomial(c.clone(), i as u32, e));
        }
        let mut on_k = BiPoly::zero();
        for (&m, c) in &self.coeffs_k {
            let e = alpha_k_exponent(spec, m).ok_or(DerivationError::SupportViolation {
                generator: 'k',
                index: m,
            })?;
            on_k = on_k.add(&BiPoly::monomial(c.clone(), m as u32, e));
        }
        Ok((on_h, on_k))
    }

    /// The α-type data `α_w = c·(φ^w − id)` for
    /// `c = Σ_t c_t h^t k^{b2 − t·b1}`; these are exactly the coefficient
    /// tables that respect commutativity of `R`.
    pub fn from_multiplier(
        spec: &ParamSpec,
        w: i64,
        multiplier: &BTreeMap<u64, Scalar>,
    ) -> Result<AlphaSpec, DerivationError> {
        if w == 0 {
            return Err(DerivationError::ZeroWeight);
        }
        let rw = spec.r().pow(w.unsigned_abs() as u32);
        let sw = spec.s().pow(w.unsigned_abs() as u32);
        let (rw, sw) = if w > 0 {
            (rw, sw)
        } else {
            (rw.inv().expect("r nonzero"), sw.inv().expect("s nonzero"))
        };
        let mut coeffs_h = BTreeMap::new();
        let mut coeffs_k = BTreeMap::new();
        for (&t, c) in multiplier {
            if c.is_zero() {
                continue;
            }
            if natural_exponent(spec.n2() - t as i64 * spec.n1(), spec.d()).is_none() {
                return Err(DerivationError::SupportViolation {
                    generator: 'c',
                    index: t,
                });
            }
            coeffs_h.insert(t + 1, rw.sub(&Scalar::one()).mul(c));
            coeffs_k.insert(t, sw.sub(&Scalar::one()).mul(c));
        }
        Ok(AlphaSpec { w, coeffs_h, coeffs_k })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("support violation: alpha_{generator} has index {index} outside its index set")]
    SupportViolation { generator: char, index: u64 },
    #[error("inconsistent on R: alpha(h)(s^w - 1)k != alpha(k)(r^w - 1)h")]
    InconsistentOnBase,
    #[error("alpha-type derivations of weight zero are not constructed")]
    ZeroWeight,
    #[error("coarseness mismatch")]
    CoarsenessMismatch,
    #[error("empty combination")]
    EmptyCombination,
}

/// One summand of a derivation as the user specified it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationKind {
    CType(CTypeSpec),
    Alpha(AlphaSpec),
}

/// A `σ_μ`-skew derivation of `L`, possibly a linear combination of
/// elementary ones sharing the same `μ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    spec: ParamSpec,
    sigma: Coarseness,
    on_x: GwaElement,
    on_y: GwaElement,
    /// `∂(p) = Σ_w α_w(p)·v_w` on `R`, keyed by weight.
    on_base: BTreeMap<i64, TwistedDerivation>,
    summands: Vec<(Scalar, DerivationKind)>,
}

impl Derivation {
    pub fn sigma(&self) -> &Coarseness {
        &self.sigma
    }

    pub fn spec(&self) -> &ParamSpec {
        &self.spec
    }

    pub fn on_x(&self) -> &GwaElement {
        &self.on_x
    }

    pub fn on_y(&self) -> &GwaElement {
        &self.on_y
    }

    pub fn summands(&self) -> &[(Scalar, DerivationKind)] {
        &self.summands
    }

    /// Whether every generator is sent to zero.
    pub fn is_zero(&self) -> bool {
        self.on_x.is_zero() && self.on_y.is_zero() && self.on_base.is_empty()
    }

    /// `∂` restricted to `R`.
    pub fn apply_base(&self, p: &BiPoly) -> GwaElement {
        self.on_base
            .values()
            .fold(GwaElement::zero(), |acc, alpha| {
                acc.add(&GwaElement::homogeneous(alpha.apply(&self.spec, p), alpha.w))
            })
    }

    fn scaled(&self, c: &Scalar) -> Derivation {
        Derivation {
            spec: self.spec.clone(),
            sigma: self.sigma.clone(),
            on_x: self.on_x.scale(c),
            on_y: self.on_y.scale(c),
            on_base: self
                .on_base
                .iter()
                .map(|(w, a)| {
                    (
                        *w,
                        TwistedDerivation {
                            w: *w,
                            on_h: a.on_h.scale(c),
                            on_k: a.on_k.scale(c),
                        },
                    )
                })
                .filter(|(_, a)| !a.is_zero())
                .collect(),
            summands: self
                .summands
                .iter()
                .map(|(k, d)| (k.mul(c), d.clone()))
                .collect(),
        }
    }

    fn plus(&self, other: &Derivation) -> Derivation {
        let mut on_base = self.on_base.clone();
        for (w, a) in &other.on_base {
            let merged = match on_base.remove(w) {
                Some(b) => TwistedDerivation {
                    w: *w,
                    on_h: b.on_h.add(&a.on_h),
                    on_k: b.on_k.add(&a.on_k),
                },
                None => a.clone(),
            };
            if !merged.is_zero() {
                on_base.insert(*w, merged);
            }
        }
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().cloned());
        Derivation {
            spec: self.spec.clone(),
            sigma: self.sigma.clone(),
            on_x: self.on_x.add(&other.on_x),
            on_y: self.on_y.add(&other.on_y),
            on_base,
            summands,
        }
    }
}

pub fn build_c_derivation(spec: &ParamSpec, c: &CTypeSpec) -> Derivation {
    let mu = spec.mu();
    let on_y = c.c0.apply_phi_power(spec, -1).scale(&mu.neg());
    Derivation {
        spec: spec.clone(),
        sigma: Coarseness::of(spec),
        on_x: GwaElement::homogeneous(c.c0.clone(), 1),
        on_y: GwaElement::homogeneous(on_y, -1),
        on_base: BTreeMap::new(),
        summands: vec![(Scalar::one(), DerivationKind::CType(c.clone()))],
    }
}

/// Checks `r·α(h) = μ·φ(α(h))` and `s·α(k) = μ·φ(α(k))` coefficientwise.
pub fn verify_alpha_compat_values(spec: &ParamSpec, on_h: &BiPoly, on_k: &BiPoly) -> bool {
    let mu = spec.mu();
    let lhs_h = on_h.scale(&spec.r());
    let rhs_h = on_h.apply_phi_power(spec, 1).scale(&mu);
    let lhs_k = on_k.scale(&spec.s());
    let rhs_k = on_k.apply_phi_power(spec, 1).scale(&mu);
    lhs_h == rhs_h && lhs_k == rhs_k
}

/// `α_w∘φ = μ·φ∘α_w` on the generators; false if a key cannot even be placed
/// on a monomial of `R`.
pub fn verify_alpha_compat(spec: &ParamSpec, a: &AlphaSpec) -> bool {
    match a.values(spec) {
        Ok((on_h, on_k)) => verify_alpha_compat_values(spec, &on_h, &on_k),
        Err(_) => false,
    }
}

pub fn build_alpha_derivation(
    spec: &ParamSpec,
    g: &BiPoly,
    a: &AlphaSpec,
) -> Result<Derivation, DerivationError> {
    if a.w == 0 {
        return Err(DerivationError::ZeroWeight);
    }
    let (on_h, on_k) = a.values(spec)?;
    let alpha = TwistedDerivation { w: a.w, on_h, on_k };
    if !alpha.is_consistent(spec) {
        return Err(DerivationError::InconsistentOnBase);
    }
    debug_assert!(verify_alpha_compat_values(spec, &alpha.on_h, &alpha.on_k));
    let a_elem = BiPoly::k().add(g);
    let w = a.w;
    let (on_x, on_y) = if w > 0 {
        let val = alpha.apply(spec, &a_elem).scale(&spec.mu());
        (GwaElement::zero(), GwaElement::homogeneous(val, w - 1))
    } else {
        let phi_a = a_elem.apply_phi_power(spec, 1);
        let val = alpha.apply(spec, &phi_a).scale(&spec.mu_inv());
        (GwaElement::homogeneous(val, w + 1), GwaElement::zero())
    };
    let mut on_base = BTreeMap::new();
    if !alpha.is_zero() {
        on_base.insert(w, alpha);
    }
    Ok(Derivation {
        spec: spec.clone(),
        sigma: Coarseness::of(spec),
        on_x,
        on_y,
        on_base,
        summands: vec![(Scalar::one(), DerivationKind::Alpha(a.clone()))],
    })
}

/// `∂(v_n)` for the basis word of weight `n`, by `∂(t·t^{n−1}) =
/// ∂(t)σ(t^{n−1}) + t·∂(t^{n−1})`.
fn apply_to_word(alg: &GwaAlgebra, d: &Derivation, n: i64) -> GwaElement {
    let (gen, value) = if n > 0 {
        (GwaElement::x(), &d.on_x)
    } else {
        (GwaElement::y(), &d.on_y)
    };
    let step = n.signum();
    let mut acc = GwaElement::zero();
    let mut len = 0;
    while len != n {
        // acc = ∂(v_len), extend to v_{len+step} = gen · v_len
        let sigma_rest = apply_sigma_with(&d.sigma, &GwaElement::basis_word(len));
        acc = alg.mul(value, &sigma_rest).add(&alg.mul(&gen, &acc));
        len += step;
    }
    acc
}

/// Applies `∂` to each component `p·v_w` as `∂(p)σ_μ(v_w) + p·∂(v_w)`.
pub fn apply_derivation(alg: &GwaAlgebra, d: &Derivation, u: &GwaElement) -> GwaElement {
    let mut out = GwaElement::zero();
    for (w, p) in u.components() {
        let dp = d.apply_base(p);
        if !dp.is_zero() {
            let sigma_word = apply_sigma_with(&d.sigma, &GwaElement::basis_word(w));
            out = out.add(&alg.mul(&dp, &sigma_word));
        }
        if w != 0 {
            let dv = apply_to_word(alg, d, w);
            out = out.add(&dv.left_mul_poly(p));
        }
    }
    out
}

/// The inner derivation `u ↦ b·σ_μ(u) − u·b`.
pub fn apply_inner(alg: &GwaAlgebra, b: &GwaElement, u: &GwaElement) -> GwaElement {
    alg.mul(b, &alg.apply_sigma_mu(u)).sub(&alg.mul(u, b))
}

/// Why a c-type derivation is not inner.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("non-inner at ({beta},{gamma})")]
pub struct NonInner {
    pub beta: u32,
    pub gamma: u32,
}

/// Solves `c0 = μ^{-1}·p − φ(p)` coefficientwise:
/// `p_{βγ} = c_{βγ} / (μ^{-1} − r^β s^γ)`.
pub fn solve_inner(spec: &ParamSpec, c: &CTypeSpec) -> Result<BiPoly, NonInner> {
    let mut p = BiPoly::zero();
    for (&(beta, gamma), coeff) in c.c0.terms() {
        let e = spec.rs_exponent(beta as i64, gamma as i64);
        if e == spec.n2() {
            return Err(NonInner { beta, gamma });
        }
        let denom = spec.mu_inv().sub(&Scalar::z_pow(e));
        let pc = coeff.div(&denom).expect("exponents differ");
        p = p.add(&BiPoly::monomial(pc, beta, gamma));
    }
    Ok(p)
}

/// Outcome of the weight-zero α-type admissibility test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weight0Check {
    /// `α_0(k + g(h))`.
    pub value_on_a: BiPoly,
    /// `c` with `α_0(a) = c·a`, when it exists.
    pub quotient: Option<BiPoly>,
}

impl Weight0Check {
    pub fn admissible(&self) -> bool {
        self.quotient.is_some()
    }
}

/// Tests whether `α_0(k + g(h))` has the factor `k + g(h)`, where `α_0` is the
/// untwisted derivation of `R` with the given values on `h` and `k`.
pub fn check_weight0_alpha_condition(alg: &GwaAlgebra, alpha0_h: &BiPoly, alpha0_k: &BiPoly) -> Weight0Check {
    let alpha = TwistedDerivation {
        w: 0,
        on_h: alpha0_h.clone(),
        on_k: alpha0_k.clone(),
    };
    let value_on_a = alpha.apply(alg.spec(), &alg.a());
    let quotient = value_on_a.exact_divide_by_a(alg.g());
    Weight0Check { value_on_a, quotient }
}

pub fn combine(ds: &[(Scalar, Derivation)]) -> Result<Derivation, DerivationError> {
    let ((c0, first), rest) = ds.split_first().ok_or(DerivationError::EmptyCombination)?;
    let mut acc = first.scaled(c0);
    for (c, d) in rest {
        if d.sigma != acc.sigma || d.spec != acc.spec {
            return Err(DerivationError::CoarsenessMismatch);
        }
        acc = acc.plus(&d.scaled(c));
    }
    Ok(acc)
}

/// Parsed form of a derivation description.
///
/// ```text
/// c0 = <bipoly>
/// w = <int>; alpha_h = {i: <scalar>, ...}; alpha_k = {m: <scalar>, ...}
/// w = <int>; multiplier = {t: <scalar>, ...}
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationSpec {
    CType(CTypeSpec),
    Alpha(AlphaSpec),
    /// `α_w = c·(φ^w − id)`, see [`AlphaSpec::from_multiplier`].
    Multiplier { w: i64, multiplier: BTreeMap<u64, Scalar> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecTextError {
    #[error("malformed derivation spec: {0}")]
    Malformed(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

fn parse_table(text: &str, params: &ParamSpec) -> Result<BTreeMap<u64, Scalar>, SpecTextError> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| SpecTextError::Malformed(format!("expected {{...}}, got '{text}'")))?;
    let mut out = BTreeMap::new();
    for entry in inner.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let (key, value) = entry
            .split_once(':')
            .ok_or_else(|| SpecTextError::Malformed(format!("expected 'index: scalar', got '{entry}'")))?;
        let key: u64 = key
            .trim()
            .parse()
            .map_err(|_| SpecTextError::Malformed(format!("bad index '{}'", key.trim())))?;
        let e = parse_expression(value, Alphabet::Gwa).map_err(ExprError::from)?;
        let c = eval_scalar(&e, Some(params)).map_err(ExprError::from)?;
        out.insert(key, c);
    }
    Ok(out)
}

impl DerivationSpec {
    pub fn parse(text: &str, params: &ParamSpec) -> Result<Self, SpecTextError> {
        let mut fields = BTreeMap::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| SpecTextError::Malformed(format!("expected 'key = value', got '{part}'")))?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }
        if let Some(c0) = fields.get("c0") {
            if fields.len() != 1 {
                return Err(SpecTextError::Malformed("c0 takes no other fields".into()));
            }
            return Ok(DerivationSpec::CType(CTypeSpec {
                c0: parse_bipoly(c0, Some(params))?,
            }));
        }
        let w: i64 = fields
            .get("w")
            .ok_or_else(|| SpecTextError::Malformed("missing 'c0' or 'w'".into()))?
            .parse()
            .map_err(|_| SpecTextError::Malformed("w must be an integer".into()))?;
        if let Some(m) = fields.get("multiplier") {
            return Ok(DerivationSpec::Multiplier {
                w,
                multiplier: parse_table(m, params)?,
            });
        }
        let table = |name: &str| match fields.get(name) {
            Some(t) => parse_table(t, params),
            None => Ok(BTreeMap::new()),
        };
        Ok(DerivationSpec::Alpha(AlphaSpec {
            w,
            coeffs_h: table("alpha_h")?,
            coeffs_k: table("alpha_k")?,
        }))
    }

    pub fn build(&self, alg: &GwaAlgebra) -> Result<Derivation, DerivationError> {
        match self {
            DerivationSpec::CType(c) => Ok(build_c_derivation(alg.spec(), c)),
            DerivationSpec::Alpha(a) => build_alpha_derivation(alg.spec(), alg.g(), a),
            DerivationSpec::Multiplier { w, multiplier } => {
                let a = AlphaSpec::from_multiplier(alg.spec(), *w, multiplier)?;
                build_alpha_derivation(alg.spec(), alg.g(), &a)
            }
        }
    }
}

fn fmt_table(f: &mut fmt::Formatter<'_>, t: &BTreeMap<u64, Scalar>) -> fmt::Result {
    let items: Vec<String> = t.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    write!(f, "{{{}}}", items.join(", "))
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w = {}; alpha_h = ", self.w)?;
        fmt_table(f, &self.coeffs_h)?;
        write!(f, "; alpha_k = ")?;
        fmt_table(f, &self.coeffs_k)
    }
}

impl fmt::Display for DerivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivationKind::CType(c) => write!(f, "c0 = {}", c.c0),
            DerivationKind::Alpha(a) => write!(f, "{a}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u64]) -> IndexSet {
        IndexSet::from_sorted(v.to_vec())
    }

    #[test]
    fn index_set_examples() {
        let (i, j) = index_sets(&ParamSpec::new(1, 3, 2).unwrap());
        assert_eq!((i, j), (set(&[0, 1]), set(&[0, 1])));

        let (i, j) = index_sets(&ParamSpec::new(1, 2, 5).unwrap());
        assert_eq!((i, j), (set(&[0, 1, 2, 3]), set(&[0, 1, 2, 3])));

        let (i, j) = index_sets(&ParamSpec::new(2, 3, 3).unwrap());
        assert!(i.contains(2));
        assert!(j.contains(1));

        let (i, _) = index_sets(&ParamSpec::new(1, 2, -3).unwrap());
        assert!(i.is_empty());

        let (i, j) = index_sets(&ParamSpec::new(1, -2, 3).unwrap());
        let nat = IndexSet::Progression {
            offset: 0,
            modulus: 1,
            threshold: 0,
        };
        assert_eq!(j, nat);
        assert_eq!(i, nat);
        let (i, _) = index_sets(&ParamSpec::new(1, -3, 2).unwrap());
        assert_eq!(
            i,
            IndexSet::Progression {
                offset: 0,
                modulus: 1,
                threshold: 1
            }
        );
    }

    #[test]
    fn progression_with_modulus() {
        // b1 = -1/2, b2 = 1/2: I condition (1 + (t−1)·1... ) checked by enumeration
        let spec = ParamSpec::new(2, -1, 1).unwrap();
        let (i, j) = index_sets(&spec);
        for t in 0..50 {
            assert_eq!(i.contains(t), alpha_h_exponent(&spec, t).is_some(), "I at {t}");
            assert_eq!(j.contains(t), alpha_k_exponent(&spec, t).is_some(), "J at {t}");
        }
        assert!(matches!(i, IndexSet::Progression { modulus: 2, .. }));
    }

    #[test]
    fn table_case_labels() {
        let case = table_case(&ParamSpec::new(1, 3, 2).unwrap()).unwrap();
        assert_eq!((case.i_branch, case.j_branch), ("b1>b2", "b1=b2+1"));
        let case = table_case(&ParamSpec::new(1, 2, 5).unwrap()).unwrap();
        assert_eq!((case.q, case.rho), (2, 1));
        assert_eq!(case.j_predicted, vec![0, 1, 2, 3]);
        assert!(table_case(&ParamSpec::new(1, -2, 3).unwrap()).is_none());
    }

    #[test]
    fn c_type_weights() {
        let spec = ParamSpec::new(1, 2, 3).unwrap();
        assert!(c_type_admissible(&spec, 0));
        assert!(!c_type_admissible(&spec, 1));
        assert!(!c_type_admissible(&spec, -5));
    }

    fn alg() -> GwaAlgebra {
        let g = BiPoly::h().pow(2).add(&BiPoly::one());
        GwaAlgebra::new(ParamSpec::new(1, 2, 3).unwrap(), g).unwrap()
    }

    #[test]
    fn c_type_on_generators() {
        let alg = alg();
        let spec = alg.spec().clone();
        let d = build_c_derivation(&spec, &CTypeSpec { c0: BiPoly::h() });
        assert_eq!(apply_derivation(&alg, &d, &GwaElement::x()), GwaElement::homogeneous(BiPoly::h(), 1));
        let expect = BiPoly::h().scale(&spec.mu().mul(&spec.r().inv().unwrap()).neg());
        assert_eq!(apply_derivation(&alg, &d, &GwaElement::y()), GwaElement::homogeneous(expect, -1));
        let xy = alg.mul(&GwaElement::x(), &GwaElement::y());
        assert!(apply_derivation(&alg, &d, &xy).is_zero());
        let by_leibniz = apply_derivation(&alg, &d, &GwaElement::x());
        let by_leibniz = alg
            .mul(&by_leibniz, &alg.apply_sigma_mu(&GwaElement::y()))
            .add(&alg.mul(&GwaElement::x(), &apply_derivation(&alg, &d, &GwaElement::y())));
        assert!(by_leibniz.is_zero());
    }

    #[test]
    fn inner_examples() {
        let spec = ParamSpec::new(1, 2, 3).unwrap();
        let p = solve_inner(&spec, &CTypeSpec { c0: BiPoly::h() }).unwrap();
        let denom = Scalar::z_pow(3).sub(&Scalar::z_pow(2));
        assert_eq!(p, BiPoly::h().scale(&denom.inv().unwrap()));

        // n2 = 2·n1 + d
        let spec = ParamSpec::new(1, 2, 5).unwrap();
        let c0 = BiPoly::monomial(Scalar::one(), 2, 1);
        assert_eq!(solve_inner(&spec, &CTypeSpec { c0 }).unwrap_err(), NonInner { beta: 2, gamma: 1 });
        assert_eq!(solve_inner(&spec, &CTypeSpec { c0: BiPoly::zero() }).unwrap(), BiPoly::zero());
    }

    #[test]
    fn alpha_generator_values() {
        // b1 = 2, b2 = 5: multiplier index t needs 5 − 2t ∈ ℕ.
        let g = BiPoly::h().add(&BiPoly::one());
        let alg = GwaAlgebra::new(ParamSpec::new(1, 2, 5).unwrap(), g).unwrap();
        let spec = alg.spec().clone();
        let mult: BTreeMap<u64, Scalar> = [(1, Scalar::one())].into_iter().collect();
        for w in [1i64, -1, 2] {
            let a = AlphaSpec::from_multiplier(&spec, w, &mult).unwrap();
            assert!(verify_alpha_compat(&spec, &a));
            let d = build_alpha_derivation(&spec, alg.g(), &a).unwrap();
            let (on_h, on_k) = a.values(&spec).unwrap();
            let alpha = TwistedDerivation { w, on_h, on_k };
            if w > 0 {
                assert!(apply_derivation(&alg, &d, &GwaElement::x()).is_zero());
                let expect = alpha.apply(&spec, &alg.a()).scale(&spec.mu());
                assert_eq!(apply_derivation(&alg, &d, &GwaElement::y()), GwaElement::homogeneous(expect, w - 1));
            } else {
                assert!(apply_derivation(&alg, &d, &GwaElement::y()).is_zero());
                let expect = alpha.apply(&spec, &alg.phi_a(1)).scale(&spec.mu_inv());
                assert_eq!(apply_derivation(&alg, &d, &GwaElement::x()), GwaElement::homogeneous(expect, w + 1));
            }
            let p = BiPoly::h().mul(&BiPoly::k()).add(&BiPoly::k().pow(2));
            assert_eq!(
                apply_derivation(&alg, &d, &GwaElement::from_poly(p.clone())),
                GwaElement::homogeneous(alpha.apply(&spec, &p), w)
            );
        }
    }

    #[test]
    fn alpha_rejections() {
        let spec = ParamSpec::new(1, 2, 5).unwrap();
        let g = BiPoly::zero();
        let bad = AlphaSpec {
            w: 1,
            coeffs_h: [(7, Scalar::one())].into_iter().collect(),
            coeffs_k: BTreeMap::new(),
        };
        assert!(matches!(
            build_alpha_derivation(&spec, &g, &bad),
            Err(DerivationError::SupportViolation { generator: 'h', index: 7 })
        ));
        assert!(!verify_alpha_compat(&spec, &bad));
        // α(h) = h^5 is not of the required shape.
        assert!(!verify_alpha_compat_values(&spec, &BiPoly::h().pow(5), &BiPoly::zero()));

        let lone = AlphaSpec {
            w: 1,
            coeffs_h: [(0, Scalar::one())].into_iter().collect(),
            coeffs_k: BTreeMap::new(),
        };
        assert!(verify_alpha_compat(&spec, &lone));
        assert_eq!(build_alpha_derivation(&spec, &g, &lone), Err(DerivationError::InconsistentOnBase));

        let empty = AlphaSpec {
            w: 1,
            coeffs_h: BTreeMap::new(),
            coeffs_k: BTreeMap::new(),
        };
        assert!(verify_alpha_compat(&spec, &empty));
        let zero_w = AlphaSpec { w: 0, ..empty };
        assert_eq!(build_alpha_derivation(&spec, &g, &zero_w), Err(DerivationError::ZeroWeight));
    }

    #[test]
    fn derivations_kill_one() {
        let alg = alg();
        let d = build_c_derivation(alg.spec(), &CTypeSpec { c0: BiPoly::k() });
        assert!(apply_derivation(&alg, &d, &GwaElement::one()).is_zero());
        let c = build_c_derivation(alg.spec(), &CTypeSpec { c0: BiPoly::h() });
        assert!(apply_derivation(&alg, &c, &GwaElement::h()).is_zero());
    }

    #[test]
    fn weight0_examples() {
        let alg = alg();
        let a = alg.a();
        let check = check_weight0_alpha_condition(&alg, &BiPoly::zero(), &a);
        assert_eq!(check.quotient, Some(BiPoly::one()));
        assert!(!check_weight0_alpha_condition(&alg, &BiPoly::zero(), &BiPoly::h()).admissible());
        let h2 = BiPoly::h().pow(2);
        let check = check_weight0_alpha_condition(&alg, &BiPoly::zero(), &a.mul(&h2));
        assert_eq!(check.quotient, Some(h2));
    }

    #[test]
    fn combinations() {
        let alg = alg();
        let d1 = build_c_derivation(alg.spec(), &CTypeSpec { c0: BiPoly::h() });
        let d2 = build_c_derivation(alg.spec(), &CTypeSpec { c0: BiPoly::k().pow(2) });
        assert_eq!(combine(&[(Scalar::one(), d1.clone())]).unwrap(), d1);
        let zero = combine(&[(Scalar::one(), d1.clone()), (Scalar::from_int(-1), d1.clone())]).unwrap();
        assert!(zero.is_zero());
        let (c1, c2) = (Scalar::from_int(3), Scalar::z_pow(1));
        let mix = combine(&[(c1.clone(), d1.clone()), (c2.clone(), d2.clone())]).unwrap();
        let u = alg.mul(&GwaElement::y(), &GwaElement::h()).add(&GwaElement::x());
        let expect = apply_derivation(&alg, &d1, &u)
            .scale(&c1)
            .add(&apply_derivation(&alg, &d2, &u).scale(&c2));
        assert_eq!(apply_derivation(&alg, &mix, &u), expect);

        let other_spec = ParamSpec::new(1, 2, 4).unwrap();
        let d3 = build_c_derivation(&other_spec, &CTypeSpec { c0: BiPoly::h() });
        assert_eq!(
            combine(&[(Scalar::one(), d1), (Scalar::one(), d3)]),
            Err(DerivationError::CoarsenessMismatch)
        );
        assert_eq!(combine(&[]), Err(DerivationError::EmptyCombination));
    }

    #[test]
    fn spec_text() {
        let spec = ParamSpec::new(1, 2, 5).unwrap();
        let c = DerivationSpec::parse("c0 = h^2*k", &spec).unwrap();
        assert_eq!(
            c,
            DerivationSpec::CType(CTypeSpec {
                c0: BiPoly::monomial(Scalar::one(), 2, 1)
            })
        );
        let a = DerivationSpec::parse("w = -1; alpha_h = {1: 3, 2: z^2}; alpha_k = {0: -1/2}", &spec).unwrap();
        match a {
            DerivationSpec::Alpha(a) => {
                assert_eq!(a.w, -1);
                assert_eq!(a.coeffs_h.len(), 2);
                assert_eq!(a.coeffs_k[&0], Scalar::from_rational(num_rational::BigRational::new((-1).into(), 2.into())));
            }
            other => panic!("{other:?}"),
        }
        let m = DerivationSpec::parse("w = 2; multiplier = {0: r}", &spec).unwrap();
        assert!(matches!(m, DerivationSpec::Multiplier { w: 2, .. }));
        assert!(DerivationSpec::parse("alpha_h = {1: 3}", &spec).is_err());
        assert!(DerivationSpec::parse("w = 1; alpha_h = 1: 3", &spec).is_err());
    }
}
