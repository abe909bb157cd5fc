//! Shift spaces given by an alphabet size and a finite set of forbidden blocks.
//!
//! A [`ShiftSpaceSpec`] is always validated and its forbidden set normalized,
//! so every other module can assume symbols are in range and no forbidden
//! block contains another one as a factor.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result, ValidationReport, Violation};

pub type Symbol = u32;

/// A finite word over the alphabet. The empty block is a valid value.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block(Vec<Symbol>);

impl Block {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Block(symbols)
    }

    pub fn empty() -> Self {
        Block(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Block(vec![0; len])
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }

    /// True when `other` occurs in `self` as a contiguous factor.
    pub fn contains_factor(&self, other: &Block) -> bool {
        contains_factor(&self.0, &other.0)
    }

    /// Renders the block in the text syntax accepted by [`parse_block`] for
    /// an alphabet of size `k`.
    pub fn to_text(&self, k: u32) -> String {
        if k <= 10 {
            self.0
                .iter()
                .map(|s| char::from_digit(*s, 10).unwrap_or('?'))
                .collect()
        } else {
            self.0
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

impl From<Vec<Symbol>> for Block {
    fn from(symbols: Vec<Symbol>) -> Self {
        Block(symbols)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| s < 10) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            f.write_str(&self.to_text(u32::MAX))
        }
    }
}

pub(crate) fn contains_factor(haystack: &[Symbol], needle: &[Symbol]) -> bool {
    needle.is_empty() || haystack.windows(needle.len()).any(|w| w == needle)
}

fn shortlex(a: &Block, b: &Block) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// A normalized forbidden set: nonempty blocks, no duplicates, and no member
/// containing another member as a factor. Members are kept in shortlex order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ForbiddenSet {
    blocks: Vec<Block>,
}

impl ForbiddenSet {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Length of the longest member, 0 for the empty set.
    pub fn max_len(&self) -> usize {
        self.blocks.iter().map(Block::len).max().unwrap_or(0)
    }

    /// True when `word` contains some member as a factor.
    pub fn occurs_in(&self, word: &[Symbol]) -> bool {
        self.blocks
            .iter()
            .any(|b| contains_factor(word, b.symbols()))
    }

    /// True when some member is a suffix of `word`.
    pub fn ends_in(&self, word: &[Symbol]) -> bool {
        self.blocks.iter().any(|b| word.ends_with(b.symbols()))
    }
}

/// Drops every block that contains a different member as a factor. The
/// avoiding language is unchanged.
pub fn normalize_forbidden_set<I>(raw: I) -> Result<ForbiddenSet>
where
    I: IntoIterator<Item = Block>,
{
    let unique: BTreeSet<Block> = raw.into_iter().collect();
    if unique.iter().any(Block::is_empty) {
        return Err(Error::Validation(ValidationReport {
            violations: vec![Violation::EmptyBlock],
        }));
    }
    let mut blocks: Vec<Block> = unique
        .iter()
        .filter(|b| !unique.iter().any(|o| o != *b && b.contains_factor(o)))
        .cloned()
        .collect();
    blocks.sort_by(shortlex);
    Ok(ForbiddenSet { blocks })
}

/// A shift space over the alphabet `{0, .., k-1}` avoiding a finite forbidden set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShiftSpaceSpec {
    alphabet_size: u32,
    forbidden: ForbiddenSet,
}

impl ShiftSpaceSpec {
    pub fn new<I>(alphabet_size: u32, forbidden: I) -> Result<Self>
    where
        I: IntoIterator<Item = Block>,
    {
        let blocks: Vec<Block> = forbidden.into_iter().collect();
        validate_spec(alphabet_size, &blocks).map_err(Error::Validation)
    }

    /// The unconstrained shift over `k` symbols.
    pub fn full_shift(alphabet_size: u32) -> Result<Self> {
        Self::new(alphabet_size, std::iter::empty())
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn forbidden(&self) -> &ForbiddenSet {
        &self.forbidden
    }

    pub fn check_symbols(&self, symbols: &[Symbol]) -> Result<()> {
        match symbols.iter().find(|&&s| s >= self.alphabet_size) {
            Some(&symbol) => Err(Error::OutOfAlphabet {
                symbol,
                alphabet_size: self.alphabet_size,
            }),
            None => Ok(()),
        }
    }
}

/// Checks a raw shift-space description and returns the normalized spec, or
/// a report listing every violation found.
pub fn validate_spec(
    alphabet_size: u32,
    blocks: &[Block],
) -> std::result::Result<ShiftSpaceSpec, ValidationReport> {
    let mut report = ValidationReport::default();
    if alphabet_size < 1 {
        report
            .violations
            .push(Violation::AlphabetTooSmall(alphabet_size));
    }
    for block in blocks {
        if block.is_empty() {
            if !report.violations.contains(&Violation::EmptyBlock) {
                report.violations.push(Violation::EmptyBlock);
            }
            continue;
        }
        for &symbol in block.symbols() {
            if symbol >= alphabet_size {
                report.violations.push(Violation::SymbolOutOfAlphabet {
                    block: block.clone(),
                    symbol,
                });
            }
        }
    }
    if !report.is_empty() {
        return Err(report);
    }
    let forbidden =
        normalize_forbidden_set(blocks.iter().cloned()).expect("empty blocks were rejected above");
    Ok(ShiftSpaceSpec {
        alphabet_size,
        forbidden,
    })
}

/// Parameters of the shift in which nonzero symbols are separated by at
/// least `m` zeroes, over `k` symbols. The golden mean shift is `(1, 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TmkParams {
    m: u32,
    k: u32,
}

impl TmkParams {
    pub fn new(m: u32, k: u32) -> Result<Self> {
        if m < 1 {
            return Err(Error::ParameterDomain(format!(
                "m = {m}, must be at least 1"
            )));
        }
        if k < 2 {
            return Err(Error::ParameterDomain(format!(
                "k = {k}, must be at least 2"
            )));
        }
        Ok(TmkParams { m, k })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }
}

impl fmt::Display for TmkParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({},{})", self.m, self.k)
    }
}

/// Forbids `a 0^j b` for nonzero `a`, `b` and `j < m`: exactly `(k-1)^2 m` blocks.
pub fn tmk_spec(params: TmkParams) -> ShiftSpaceSpec {
    let (m, k) = (params.m as usize, params.k);
    let mut blocks = Vec::with_capacity((k as usize - 1).pow(2) * m);
    for a in 1..k {
        for b in 1..k {
            for j in 0..m {
                let mut w = Vec::with_capacity(j + 2);
                w.push(a);
                w.extend(std::iter::repeat_n(0, j));
                w.push(b);
                blocks.push(Block(w));
            }
        }
    }
    ShiftSpaceSpec::new(k, blocks).expect("generated blocks are within the alphabet")
}

/// Parses a block: compact digits (`"0110"`) when `k <= 10`, otherwise
/// comma-separated decimals (`"10,0,3"`). Commas are accepted for any `k`.
pub fn parse_block(text: &str, k: u32) -> Result<Block> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty block text".into()));
    }
    let symbols: Vec<Symbol> = if k <= 10 && !text.contains(',') {
        text.chars()
            .map(|c| {
                c.to_digit(10)
                    .ok_or_else(|| Error::Parse(format!("invalid digit {c:?} in {text:?}")))
            })
            .collect::<Result<_>>()?
    } else {
        text.split(',')
            .map(|field| {
                field
                    .trim()
                    .parse::<Symbol>()
                    .map_err(|e| Error::Parse(format!("invalid symbol {field:?} in {text:?}: {e}")))
            })
            .collect::<Result<_>>()?
    };
    if let Some(&symbol) = symbols.iter().find(|&&s| s >= k) {
        return Err(Error::OutOfAlphabet {
            symbol,
            alphabet_size: k,
        });
    }
    Ok(Block(symbols))
}

/// Reads the forbidden-set file format: a `k=<n>` line followed by one block
/// per line; lines starting with `#` are comments and blank lines are ignored.
pub fn parse_spec_file(text: &str) -> Result<ShiftSpaceSpec> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (lineno, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("missing `k=<integer>` header".into()))?;
    let k = header
        .strip_prefix("k=")
        .or_else(|| header.strip_prefix("k ="))
        .and_then(|v| v.trim().parse::<u32>().ok())
        .ok_or_else(|| {
            Error::Parse(format!(
                "line {lineno}: expected `k=<integer>`, got {header:?}"
            ))
        })?;

    let mut blocks = Vec::new();
    for (lineno, line) in lines {
        let block = parse_block(line, k).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("line {lineno}: {msg}")),
            other => other,
        })?;
        blocks.push(block);
    }
    ShiftSpaceSpec::new(k, blocks)
}

/// Renders a spec in the file format read by [`parse_spec_file`].
pub fn write_spec_file(spec: &ShiftSpaceSpec) -> String {
    let mut out = format!("k={}\n", spec.alphabet_size());
    for b in spec.forbidden().blocks() {
        out.push_str(&b.to_text(spec.alphabet_size()));
        out.push('\n');
    }
    out
}
