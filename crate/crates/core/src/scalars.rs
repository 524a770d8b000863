//! Exact arithmetic in the rational function field ℚ(z).
//!
//! The algebra parameters are modelled as monomials in a single
//! transcendental `z`: `r = z^n1`, `s = z^d` and `μ^{-1} = z^n2`. Because `z`
//! is transcendental, every equality between products of powers of `r`, `s`
//! and `μ` reduces to an integer identity between exponents.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary precision rational number.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("zero divisor")]
    ZeroDivisor,
}

/// Dense univariate polynomial in `z` with rational coefficients, lowest
/// degree first. Trailing zeros are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ZPoly {
    coeffs: Vec<Rational>,
}

// Integer coefficients are the common case; skip the gcd-based reduction
// that the generic rational operations perform.
fn rat_mul(a: &Rational, b: &Rational) -> Rational {
    if a.denom().is_one() && b.denom().is_one() {
        Rational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

fn rat_add_assign(a: &mut Rational, b: &Rational) {
    if a.denom().is_one() && b.denom().is_one() {
        *a = Rational::from_integer(a.numer() + b.numer());
    } else {
        *a += b;
    }
}

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * z^n`.
    pub fn monomial(c: Rational, n: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Largest `k` with `z^k` dividing `self`; zero for the zero polynomial.
    pub fn z_order(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    fn is_monomial(&self) -> bool {
        !self.is_zero() && self.z_order() + 1 == self.coeffs.len()
    }

    fn shift_down(&self, k: usize) -> Self {
        ZPoly {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        ZPoly { coeffs }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ZPoly {
            coeffs: self.coeffs.iter().map(|x| rat_mul(x, c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        let coeffs = (0..n)
            .map(|i| {
                let mut c = self.coeffs.get(i).unwrap_or(&zero).clone();
                rat_add_assign(&mut c, other.coeffs.get(i).unwrap_or(&zero));
                c
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        ZPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    rat_add_assign(&mut coeffs[i + j], &rat_mul(a, b));
                }
            }
        }
        Self::from_coeffs(coeffs)
    }

    /// Euclidean division; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let c = if lead.is_one() {
                rem[i + dd].clone()
            } else {
                &rem[i + dd] / &lead
            };
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rat_add_assign(&mut rem[i + j], &-rat_mul(&c, dc));
            }
            quot[i] = c;
        }
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Divides by the leading coefficient. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) if !l.is_one() => self.scale(&l.recip()),
            _ => self.clone(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.degree() == Some(0) || other.degree() == Some(0) {
            return Self::one();
        }
        if self.is_monomial() || other.is_monomial() {
            let k = self.z_order().min(other.z_order());
            return Self::monomial(Rational::one(), k);
        }
        let k = self.z_order().min(other.z_order());
        let mut a = self.shift_down(self.z_order());
        let mut b = other.shift_down(other.z_order());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic().shift_up(k)
    }

    pub fn eval_rational(&self, z: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * z + c)
    }
}

fn fmt_rational_coeff(c: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => fmt_rational_coeff(&abs, f)?,
                _ => {
                    if !abs.is_one() {
                        fmt_rational_coeff(&abs, f)?;
                        write!(f, "*")?;
                    }
                    if i == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// An element of ℚ(z), kept as a reduced fraction with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    num: ZPoly,
    den: ZPoly,
}

impl Default for Scalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            num: ZPoly::zero(),
            den: ZPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(c: Rational) -> Self {
        Scalar {
            num: ZPoly::constant(c),
            den: ZPoly::one(),
        }
    }

    pub fn from_poly(p: ZPoly) -> Self {
        Scalar {
            num: p,
            den: ZPoly::one(),
        }
    }

    /// `z^e` for any integer `e`.
    pub fn z_pow(e: i64) -> Self {
        let n = e.unsigned_abs() as usize;
        let mono = ZPoly::monomial(Rational::one(), n);
        if e >= 0 {
            Self::from_poly(mono)
        } else {
            Scalar {
                num: ZPoly::one(),
                den: mono,
            }
        }
    }

    /// Builds `num / den` in lowest terms.
    pub fn from_fraction(num: ZPoly, den: ZPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::ZeroDivisor);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: ZPoly, den: ZPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        Self::with_monic_den(num, den)
    }

    fn with_monic_den(num: ZPoly, den: ZPoly) -> Self {
        let lead = den.leading().expect("nonzero denominator").clone();
        if lead.is_one() {
            Scalar { num, den }
        } else {
            let inv = lead.recip();
            Scalar {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numer(&self) -> &ZPoly {
        &self.num
    }

    pub fn denom(&self) -> &ZPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The value as a rational number when it does not depend on `z`.
    pub fn as_rational(&self) -> Option<Rational> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(Rational::zero()),
            (Some(0), Some(0)) => Some(self.num.coeffs()[0].clone()),
            _ => None,
        }
    }

    /// When the value is `c * z^e`, returns `(c, e)`.
    pub fn as_monomial(&self) -> Option<(Rational, i64)> {
        if !self.num.is_monomial() || !self.den.is_monomial() {
            return None;
        }
        let e = self.num.z_order() as i64 - self.den.z_order() as i64;
        Some((self.num.leading()?.clone(), e))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            if self.den.is_one() {
                return Self::from_poly(self.num.add(&other.num));
            }
            return Self::normalized(self.num.add(&other.num), self.den.clone());
        }
        let g = self.den.gcd(&other.den);
        let (a_cof, b_cof) = if g.is_one() {
            (other.den.clone(), self.den.clone())
        } else {
            (other.den.div_rem(&g).0, self.den.div_rem(&g).0)
        };
        let num = self.num.mul(&a_cof).add(&other.num.mul(&b_cof));
        if num.is_zero() {
            return Self::zero();
        }
        // Both inputs are reduced, so any common factor of the sum divides g.
        let common = num.gcd(&g);
        let den = self.den.mul(&a_cof);
        if common.is_one() {
            Self::with_monic_den(num, den)
        } else {
            Self::with_monic_den(num.div_rem(&common).0, den.div_rem(&common).0)
        }
    }

    pub fn neg(&self) -> Self {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let div = |p: &ZPoly, g: &ZPoly| if g.is_one() { p.clone() } else { p.div_rem(g).0 };
        let num = div(&self.num, &g1).mul(&div(&other.num, &g2));
        let den = div(&self.den, &g2).mul(&div(&other.den, &g1));
        Self::with_monic_den(num, den)
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroDivisor);
        }
        Ok(Self::with_monic_den(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = Scalar::mul(&acc, &base);
            }
            base = Scalar::mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Evaluates at a rational point; `None` at a pole.
    pub fn eval_rational(&self, z: &Rational) -> Option<Rational> {
        let d = self.den.eval_rational(z);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_rational(z) / d)
        }
    }

    /// Whether the printed form needs parentheses when used as a factor.
    pub fn is_atomic(&self) -> bool {
        self.den.is_one()
            && self.num.coeffs().iter().filter(|c| !c.is_zero()).count() <= 1
            && self.num.leading().is_none_or(|c| c.denom().is_one() && !c.is_negative())
    }
}

/// The binary operations of [`scalar_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
    Ok(match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b)?,
    })
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            let single = |p: &ZPoly| p.coeffs().iter().filter(|c| !c.is_zero()).count() == 1;
            let (num, den) = (self.num.to_string(), self.den.to_string());
            let num = if single(&self.num) { num } else { format!("({num})") };
            let den = if single(&self.den) { den } else { format!("({den})") };
            write!(f, "{num}/{den}")
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                $body(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                $body(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &Scalar, b: &Scalar| Scalar::add(a, b));
forward_binop!(Sub, sub, |a: &Scalar, b: &Scalar| Scalar::sub(a, b));
forward_binop!(Mul, mul, |a: &Scalar, b: &Scalar| Scalar::mul(a, b));
forward_binop!(Div, div, |a: &Scalar, b: &Scalar| Scalar::div(a, b)
    .expect("zero divisor"));

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(c: Rational) -> Self {
        Scalar::from_rational(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("d must be a positive integer, got {0}")]
    NonPositiveD(i64),
    #[error("b1 zero")]
    B1Zero,
    #[error("mu equals one")]
    MuEqualsOne,
    #[error("b1 is a reciprocal integer (b1 = 1/{q}, so s = r^{q})")]
    B1Reciprocal { q: i64 },
    #[error("gamma nonzero unsupported")]
    GammaNonzero,
}

/// Exponent data for the parameters: `r = z^n1`, `s = z^d`, `μ^{-1} = z^n2`,
/// so that `r = s^{b1}` and `μ^{-1} = s^{b2}` with `b1 = n1/d`, `b2 = n2/d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamSpec {
    d: i64,
    n1: i64,
    n2: i64,
    gamma: Rational,
}

/// Selects one of the three parameter monomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    R,
    S,
    MuInv,
}

impl ParamSpec {
    pub fn new(d: i64, n1: i64, n2: i64) -> Result<Self, ParamError> {
        validate_param_spec(d, n1, n2, Rational::zero())
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn n1(&self) -> i64 {
        self.n1
    }

    pub fn n2(&self) -> i64 {
        self.n2
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    pub fn b1(&self) -> Rational {
        Rational::new(self.n1.into(), self.d.into())
    }

    pub fn b2(&self) -> Rational {
        Rational::new(self.n2.into(), self.d.into())
    }

    /// Exponent of `z` in the selected parameter.
    pub fn exponent(&self, which: Param) -> i64 {
        match which {
            Param::R => self.n1,
            Param::S => self.d,
            Param::MuInv => self.n2,
        }
    }

    pub fn power(&self, which: Param, e: i64) -> Scalar {
        param_power(self, which, e)
    }

    pub fn r(&self) -> Scalar {
        self.power(Param::R, 1)
    }

    pub fn s(&self) -> Scalar {
        self.power(Param::S, 1)
    }

    pub fn mu(&self) -> Scalar {
        self.power(Param::MuInv, -1)
    }

    pub fn mu_inv(&self) -> Scalar {
        self.power(Param::MuInv, 1)
    }

    /// `z`-exponent of `r^i s^j`.
    pub fn rs_exponent(&self, i: i64, j: i64) -> i64 {
        self.n1 * i + self.d * j
    }
}

impl fmt::Display for ParamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r = z^{}, s = z^{}, mu^-1 = z^{} (b1 = {}, b2 = {})",
            self.n1,
            self.d,
            self.n2,
            self.b1(),
            self.b2()
        )
    }
}

pub fn param_power(spec: &ParamSpec, which: Param, e: i64) -> Scalar {
    Scalar::z_pow(spec.exponent(which) * e)
}

pub fn validate_param_spec(d: i64, n1: i64, n2: i64, gamma: Rational) -> Result<ParamSpec, ParamError> {
    if d < 1 {
        return Err(ParamError::NonPositiveD(d));
    }
    if !gamma.is_zero() {
        return Err(ParamError::GammaNonzero);
    }
    if n1 == 0 {
        return Err(ParamError::B1Zero);
    }
    if n2 == 0 {
        return Err(ParamError::MuEqualsOne);
    }
    if n1 > 0 && d.mod_floor(&n1) == 0 {
        return Err(ParamError::B1Reciprocal { q: d / n1 });
    }
    Ok(ParamSpec { d, n1, n2, gamma })
}
