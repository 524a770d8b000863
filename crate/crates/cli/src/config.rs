//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use downup::expr::{eval_scalar, parse_expression, Alphabet, ExprError, ParseError};
use downup::{Expr, ParamSpec, Scalar};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Human,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphabetChoice {
    /// `d, u, h`
    Du,
    /// `x, y, h, k`
    Gwa,
    /// Whichever of the two the expression is written in.
    Auto,
}

/// Keys accepted in a config file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub d: Option<i64>,
    pub n1: Option<i64>,
    pub n2: Option<i64>,
    pub f: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub format: Option<Format>,
    pub alphabet: Option<AlphabetChoice>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: ParamSpec,
    pub f: Vec<Scalar>,
    pub seed: u64,
    pub samples: usize,
    pub format: Format,
    pub alphabet: AlphabetChoice,
}

pub struct Overrides {
    pub d: Option<i64>,
    pub n1: Option<i64>,
    pub n2: Option<i64>,
    pub f: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub format: Option<Format>,
    pub alphabet: Option<AlphabetChoice>,
}

impl RunConfig {
    pub fn resolve(flags: Overrides, file: FileConfig) -> Result<Self> {
        let d = flags.d.or(file.d).context("missing --d")?;
        let n1 = flags.n1.or(file.n1).context("missing --n1")?;
        let n2 = flags.n2.or(file.n2).context("missing --n2")?;
        let spec = ParamSpec::new(d, n1, n2)?;
        let f_text = flags.f.or(file.f).unwrap_or_default();
        let f = parse_coeff_list(&f_text, &spec)?;
        let samples = flags.samples.or(file.samples).unwrap_or(100);
        if samples == 0 {
            bail!("--samples must be at least 1");
        }
        Ok(RunConfig {
            spec,
            f,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            samples,
            format: flags.format.or(file.format).unwrap_or(Format::Human),
            alphabet: flags.alphabet.or(file.alphabet).unwrap_or(AlphabetChoice::Auto),
        })
    }
}

/// `"c0, c1, ..."`, constant term first; an empty list is `f = 0`.
pub fn parse_coeff_list(text: &str, spec: &ParamSpec) -> Result<Vec<Scalar>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .enumerate()
        .map(|(i, item)| {
            let e = parse_expression(item, Alphabet::Gwa).map_err(ExprError::from);
            e.and_then(|e| Ok(eval_scalar(&e, Some(spec))?))
                .with_context(|| format!("coefficient {i} of --f"))
        })
        .collect()
}

/// Parses in the chosen alphabet; `Auto` tries down-up first.
pub fn parse_in(text: &str, choice: AlphabetChoice) -> Result<Expr, ParseError> {
    match choice {
        AlphabetChoice::Du => parse_expression(text, Alphabet::DownUp),
        AlphabetChoice::Gwa => parse_expression(text, Alphabet::Gwa),
        AlphabetChoice::Auto => match parse_expression(text, Alphabet::DownUp) {
            Err(ParseError::NotInAlphabet { .. }) => parse_expression(text, Alphabet::Gwa),
            other => other,
        },
    }
}
