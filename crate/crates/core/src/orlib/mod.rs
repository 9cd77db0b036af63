//! OR-Library one-dimensional bin packing files.
//!
//! Layout: the problem count, then per problem an identifier, a line
//! `capacity item_count best_known`, and `item_count` item sizes. Tokens may
//! be separated by any whitespace. Sizes are normally integers; fixed-point
//! decimals (as in the triplet files) are accepted and scaled by a power of
//! ten per problem so that sizes stay exact integers.

mod fetch;
mod generate;

pub use fetch::{
    dataset_file_name, dataset_url, fetch_dataset, fetch_dataset_with, load_cached, FetchError,
    Offline, Transport, DATASETS, ORLIB_BASE_URL,
};
#[cfg(feature = "http")]
pub use fetch::HttpTransport;
pub use generate::{generate_all_small, generate_uniform, GenerateError, GENERATED_DENOMINATOR};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{parse_decimal, Instance, ModelError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetFile {
    /// Where the text came from: a path, a URL, or a dataset name.
    pub source: String,
    pub problem_count: usize,
    pub instances: Vec<Instance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected an integer, found {0:?}")]
    NotAnInteger(String),
    #[error("expected a size, found {0:?}")]
    NotASize(String),
    #[error("capacity must be positive")]
    ZeroCapacity,
    #[error("item size must be positive")]
    ZeroSize,
    #[error("item size {size} exceeds capacity {capacity}")]
    Oversized { size: String, capacity: String },
    #[error("unexpected trailing token {0:?}")]
    Trailing(String),
}

struct Tokens<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let inner = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| line.split_whitespace().map(move |t| (i + 1, t)));
        Tokens {
            inner: Box::new(inner),
            last_line: text.lines().count().max(1),
        }
    }

    fn next(&mut self) -> Result<(usize, &'a str), ParseError> {
        self.inner.next().ok_or(ParseError {
            line: self.last_line,
            kind: ParseErrorKind::UnexpectedEnd,
        })
    }

    fn integer(&mut self) -> Result<(usize, u64), ParseError> {
        let (line, tok) = self.next()?;
        tok.parse::<u64>().map(|v| (line, v)).map_err(|_| ParseError {
            line,
            kind: ParseErrorKind::NotAnInteger(tok.to_string()),
        })
    }

    /// A size literal as (digits, fractional digit count).
    fn size(&mut self) -> Result<(usize, &'a str, (u64, u32)), ParseError> {
        let (line, tok) = self.next()?;
        parse_decimal(tok)
            .map(|v| (line, tok, v))
            .map_err(|_| ParseError {
                line,
                kind: ParseErrorKind::NotASize(tok.to_string()),
            })
    }
}

/// Parses OR-Library bin packing text.
pub fn parse_orlib(text: &str) -> Result<DatasetFile, ParseError> {
    let mut tokens = Tokens::new(text);
    let (_, count) = tokens.integer()?;
    let count = count as usize;
    let mut instances = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        instances.push(parse_problem(&mut tokens)?);
    }
    if let Some((line, tok)) = tokens.inner.next() {
        return Err(ParseError {
            line,
            kind: ParseErrorKind::Trailing(tok.to_string()),
        });
    }
    Ok(DatasetFile {
        source: String::new(),
        problem_count: count,
        instances,
    })
}

fn parse_problem(tokens: &mut Tokens<'_>) -> Result<Instance, ParseError> {
    let (_, name) = tokens.next()?;
    let (cap_line, cap_tok, capacity) = tokens.size()?;
    let (_, item_count) = tokens.integer()?;
    let (_, best_known) = tokens.integer()?;
    let mut sizes = Vec::with_capacity((item_count as usize).min(1 << 20));
    for _ in 0..item_count {
        sizes.push(tokens.size()?);
    }

    let scale = sizes
        .iter()
        .map(|&(_, _, (_, d))| d)
        .chain(std::iter::once(capacity.1))
        .max()
        .unwrap_or(0);
    let widen = |line: usize, tok: &str, (digits, d): (u64, u32)| {
        10u64
            .checked_pow(scale - d)
            .and_then(|f| digits.checked_mul(f))
            .ok_or_else(|| ParseError {
                line,
                kind: ParseErrorKind::NotASize(tok.to_string()),
            })
    };
    let cap = widen(cap_line, cap_tok, capacity)?;
    if cap == 0 {
        return Err(ParseError {
            line: cap_line,
            kind: ParseErrorKind::ZeroCapacity,
        });
    }
    let mut ints = Vec::with_capacity(sizes.len());
    for &(line, tok, value) in &sizes {
        let size = widen(line, tok, value)?;
        if size == 0 {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::ZeroSize,
            });
        }
        if size > cap {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::Oversized {
                    size: tok.to_string(),
                    capacity: cap_tok.to_string(),
                },
            });
        }
        ints.push(size);
    }
    let instance = Instance::from_sizes(name, cap, &ints).map_err(|e| ParseError {
        line: cap_line,
        kind: e.into(),
    })?;
    Ok(instance.with_best_known((best_known > 0).then_some(best_known)))
}

/// Canonical OR-Library text: integer sizes, one token group per line.
/// An unknown best-known count is written as 0.
pub fn to_orlib_string(instances: &[Instance]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", instances.len());
    for inst in instances {
        let _ = writeln!(out, "{}", inst.name);
        let _ = writeln!(
            out,
            "{} {} {}",
            inst.capacity(),
            inst.len(),
            inst.best_known.unwrap_or(0)
        );
        for item in inst.items() {
            let _ = writeln!(out, "{}", item.weight.numerator());
        }
    }
    out
}

impl From<ModelError> for ParseErrorKind {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::ZeroCapacity => ParseErrorKind::ZeroCapacity,
            ModelError::ZeroSize { .. } => ParseErrorKind::ZeroSize,
            ModelError::Oversized { size, capacity, .. } => ParseErrorKind::Oversized {
                size: size.to_string(),
                capacity: capacity.to_string(),
            },
            ModelError::BadDecimal(s) => ParseErrorKind::NotASize(s),
        }
    }
}
