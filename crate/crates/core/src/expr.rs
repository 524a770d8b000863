//! Expression front-end: a recursive descent parser for noncommutative
//! expressions over the down-up generators `{d, u, h}` or the GWA generators
//! `{x, y, h, k}`, together with a generic evaluator.
//!
//! Grammar (multiplication is noncommutative and left-associative):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ['^' nat]
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Besides the generators, the identifiers `z`, `r`, `s` and `mu` denote
//! scalars. The right operand of `/` must be scalar-valued.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::scalars::{Param, ParamSpec, Scalar, ScalarError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    D,
    U,
    H,
    K,
    X,
    Y,
}

impl Generator {
    pub fn symbol(self) -> &'static str {
        match self {
            Generator::D => "d",
            Generator::U => "u",
            Generator::H => "h",
            Generator::K => "k",
            Generator::X => "x",
            Generator::Y => "y",
        }
    }
}

/// Which generator set an expression may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    /// `{d, u, h}`.
    DownUp,
    /// `{x, y, h, k}`.
    Gwa,
}

impl Alphabet {
    pub fn contains(self, g: Generator) -> bool {
        match self {
            Alphabet::DownUp => matches!(g, Generator::D | Generator::U | Generator::H),
            Alphabet::Gwa => matches!(g, Generator::X | Generator::Y | Generator::H | Generator::K),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Alphabet::DownUp => "du-presentation",
            Alphabet::Gwa => "gwa-presentation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarSymbol {
    Z,
    R,
    S,
    Mu,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(BigInt),
    Scalar(ScalarSymbol),
    Gen(Generator),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Number of top-level summands.
    pub fn term_count(&self) -> usize {
        match self {
            Expr::Add(a, b) | Expr::Sub(a, b) => a.term_count() + b.term_count(),
            _ => 1,
        }
    }

    pub fn generators(&self) -> Vec<Generator> {
        let mut out = Vec::new();
        self.collect_generators(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_generators(&self, out: &mut Vec<Generator>) {
        match self {
            Expr::Gen(g) => out.push(*g),
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_generators(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_generators(out);
                b.collect_generators(out);
            }
            Expr::Int(_) | Expr::Scalar(_) => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Neg(_) => 2,
            Expr::Mul(..) | Expr::Div(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Int(n) if n.sign() == num_bigint::Sign::Minus => 2,
            _ => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Scalar(s) => write!(
                f,
                "{}",
                match s {
                    ScalarSymbol::Z => "z",
                    ScalarSymbol::R => "r",
                    ScalarSymbol::S => "s",
                    ScalarSymbol::Mu => "mu",
                }
            ),
            Expr::Gen(g) => write!(f, "{}", g.symbol()),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_operand(f, a, 3)
            }
            Expr::Add(a, b) => {
                write!(f, "{a} + ")?;
                write_operand(f, b, 3)
            }
            Expr::Sub(a, b) => {
                write!(f, "{a} - ")?;
                write_operand(f, b, 3)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 3)?;
                write!(f, "*")?;
                write_operand(f, b, 4)
            }
            Expr::Div(a, b) => {
                write_operand(f, a, 3)?;
                write!(f, "/")?;
                write_operand(f, b, 4)
            }
            Expr::Pow(a, n) => {
                write_operand(f, a, 5)?;
                write!(f, "^{n}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character '{ch}' at position {pos}")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("unexpected {found} at position {pos}, expected {expected}")]
    Unexpected {
        pos: usize,
        found: String,
        expected: &'static str,
    },
    #[error("unknown identifier '{name}' at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("generator '{name}' at position {pos} is not in the {alphabet} alphabet")]
    NotInAlphabet {
        pos: usize,
        name: String,
        alphabet: &'static str,
    },
    #[error("exponent at position {pos} is too large")]
    ExponentTooLarge { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Int(digits.parse().expect("ascii digits"))));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                    i += 1;
                }
                let name: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Ident(name)));
                continue;
            }
            ch => return Err(ParseError::UnexpectedChar { pos, ch }),
        };
        out.push((pos, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    alphabet: Alphabet,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        ParseError::Unexpected {
            pos: self.pos(),
            found: self.peek().describe(),
            expected,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = if *self.peek() == Tok::Minus {
            self.bump();
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => {
                let e = u32::try_from(n).map_err(|_| ParseError::ExponentTooLarge { pos })?;
                Ok(Expr::Pow(Box::new(base), e))
            }
            _ => {
                self.at -= 1;
                Err(self.unexpected("a natural exponent"))
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Ident(name) => {
                self.bump();
                self.identifier(pos, name)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("')'"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected("a number, generator or '('")),
        }
    }

    fn identifier(&self, pos: usize, name: String) -> Result<Expr, ParseError> {
        let scalar = match name.as_str() {
            "z" => Some(ScalarSymbol::Z),
            "r" => Some(ScalarSymbol::R),
            "s" => Some(ScalarSymbol::S),
            "mu" => Some(ScalarSymbol::Mu),
            _ => None,
        };
        if let Some(s) = scalar {
            return Ok(Expr::Scalar(s));
        }
        let gen = match name.as_str() {
            "d" => Generator::D,
            "u" => Generator::U,
            "h" => Generator::H,
            "k" => Generator::K,
            "x" => Generator::X,
            "y" => Generator::Y,
            _ => return Err(ParseError::UnknownIdentifier { pos, name }),
        };
        if !self.alphabet.contains(gen) {
            return Err(ParseError::NotInAlphabet {
                pos,
                name,
                alphabet: self.alphabet.name(),
            });
        }
        Ok(Expr::Gen(gen))
    }
}

pub fn parse_expression(text: &str, alphabet: Alphabet) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        alphabet,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("'{0}' needs parameter values")]
    MissingParams(&'static str),
    #[error("divisor must be a scalar, found generator '{0}'")]
    NonScalarDivisor(&'static str),
    #[error("generator '{0}' cannot be used here")]
    Generator(&'static str),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A ring into which expressions can be evaluated.
pub trait ExprTarget {
    type Elem: Clone;

    fn params(&self) -> Option<&ParamSpec>;
    fn constant(&self, c: Scalar) -> Self::Elem;
    fn generator(&self, g: Generator) -> Result<Self::Elem, EvalError>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, c: &Scalar, a: &Self::Elem) -> Self::Elem;
}

fn scalar_symbol(sym: ScalarSymbol, params: Option<&ParamSpec>) -> Result<Scalar, EvalError> {
    let need = |name| params.ok_or(EvalError::MissingParams(name));
    Ok(match sym {
        ScalarSymbol::Z => Scalar::z_pow(1),
        ScalarSymbol::R => need("r")?.power(Param::R, 1),
        ScalarSymbol::S => need("s")?.power(Param::S, 1),
        ScalarSymbol::Mu => need("mu")?.mu(),
    })
}

/// Evaluates a generator-free expression to a scalar.
pub fn eval_scalar(e: &Expr, params: Option<&ParamSpec>) -> Result<Scalar, EvalError> {
    Ok(match e {
        Expr::Int(n) => Scalar::from_rational(n.clone().into()),
        Expr::Scalar(s) => scalar_symbol(*s, params)?,
        Expr::Gen(g) => return Err(EvalError::NonScalarDivisor(g.symbol())),
        Expr::Neg(a) => eval_scalar(a, params)?.neg(),
        Expr::Add(a, b) => eval_scalar(a, params)?.add(&eval_scalar(b, params)?),
        Expr::Sub(a, b) => eval_scalar(a, params)?.sub(&eval_scalar(b, params)?),
        Expr::Mul(a, b) => eval_scalar(a, params)?.mul(&eval_scalar(b, params)?),
        Expr::Div(a, b) => eval_scalar(a, params)?.div(&eval_scalar(b, params)?)?,
        Expr::Pow(a, n) => eval_scalar(a, params)?.pow(*n),
    })
}

pub fn evaluate<T: ExprTarget>(target: &T, e: &Expr) -> Result<T::Elem, EvalError> {
    Ok(match e {
        Expr::Int(_) | Expr::Scalar(_) => target.constant(eval_scalar(e, target.params())?),
        Expr::Gen(g) => target.generator(*g)?,
        Expr::Neg(a) => target.scale(&Scalar::from_int(-1), &evaluate(target, a)?),
        Expr::Add(a, b) => target.add(&evaluate(target, a)?, &evaluate(target, b)?),
        Expr::Sub(a, b) => {
            let nb = target.scale(&Scalar::from_int(-1), &evaluate(target, b)?);
            target.add(&evaluate(target, a)?, &nb)
        }
        Expr::Mul(a, b) => target.mul(&evaluate(target, a)?, &evaluate(target, b)?),
        Expr::Div(a, b) => {
            let inv = eval_scalar(b, target.params())?.inv()?;
            target.scale(&inv, &evaluate(target, a)?)
        }
        Expr::Pow(a, n) => {
            let base = evaluate(target, a)?;
            let mut acc = target.constant(Scalar::one());
            for _ in 0..*n {
                acc = target.mul(&acc, &base);
            }
            acc
        }
    })
}

/// Parses a scalar literal such as `(2*z^3 - 1)/(z - 1)` or `3/4`.
pub fn parse_scalar(text: &str) -> Result<Scalar, ExprError> {
    let e = parse_expression(text, Alphabet::Gwa)?;
    Ok(eval_scalar(&e, None)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
