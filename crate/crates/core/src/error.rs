use std::fmt;

use thiserror::Error;

use crate::shift::Block;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("symbol {symbol} is outside the alphabet of size {alphabet_size}")]
    OutOfAlphabet { symbol: u32, alphabet_size: u32 },

    #[error("invalid shift space: {0}")]
    Validation(ValidationReport),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// Trimming removed every state; no bi-infinite sequence avoids the forbidden set.
    #[error("empty shift space: entropy is undefined")]
    EmptyShift,

    #[error("no convergence after {iterations} iterations (last estimate {last}, residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        residual: f64,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One problem found while validating a shift-space description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    AlphabetTooSmall(u32),
    EmptyBlock,
    SymbolOutOfAlphabet { block: Block, symbol: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AlphabetTooSmall(k) => write!(f, "alphabet size {k} must be at least 1"),
            Violation::EmptyBlock => write!(f, "forbidden set contains the empty block"),
            Violation::SymbolOutOfAlphabet { block, symbol } => {
                write!(f, "block {block}: symbol {symbol} out of alphabet")
            }
        }
    }
}

/// Every violation found in a single validation pass.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
