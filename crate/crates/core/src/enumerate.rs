//! Ground-truth counting and listing of allowed blocks.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::shift::{Block, ShiftSpaceSpec, Symbol, TmkParams};

/// Default bound on `k^n` above which [`enumerate_blocks`] refuses to run.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

/// Allowed-block counts indexed by length, starting at `n_min`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSequence {
    pub n_min: usize,
    pub counts: Vec<BigUint>,
}

impl CountSequence {
    pub fn new(n_min: usize, counts: Vec<BigUint>) -> Self {
        CountSequence { n_min, counts }
    }

    pub fn from_u64(n_min: usize, counts: &[u64]) -> Self {
        CountSequence::new(n_min, counts.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Largest length covered, if any.
    pub fn n_max(&self) -> Option<usize> {
        (!self.counts.is_empty()).then(|| self.n_min + self.counts.len() - 1)
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        n.checked_sub(self.n_min).and_then(|i| self.counts.get(i))
    }

    /// `(n, count)` pairs in increasing `n`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigUint)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.n_min + i, c))
    }
}

/// True iff no forbidden block occurs in `block`.
pub fn is_allowed(spec: &ShiftSpaceSpec, block: &Block) -> Result<bool> {
    spec.check_symbols(block.symbols())?;
    Ok(!spec.forbidden().occurs_in(block.symbols()))
}

/// All allowed `n`-blocks in lexicographic order, refusing when `k^n`
/// exceeds [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_blocks(spec: &ShiftSpaceSpec, n: usize) -> Result<Vec<Block>> {
    enumerate_blocks_capped(spec, n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_blocks_capped(spec: &ShiftSpaceSpec, n: usize, cap: u64) -> Result<Vec<Block>> {
    let k = spec.alphabet_size();
    let bound = (k as f64).powi(n as i32);
    if bound > cap as f64 {
        return Err(Error::ResourceLimit(format!(
            "enumerating {k}^{n} candidate blocks exceeds the cap of {cap}; use count instead"
        )));
    }
    let mut out = Vec::new();
    let mut prefix: Vec<Symbol> = Vec::with_capacity(n);
    extend_prefix(spec, n, &mut prefix, &mut out);
    Ok(out)
}

fn extend_prefix(spec: &ShiftSpaceSpec, n: usize, prefix: &mut Vec<Symbol>, out: &mut Vec<Block>) {
    if prefix.len() == n {
        out.push(Block::new(prefix.clone()));
        return;
    }
    for s in 0..spec.alphabet_size() {
        prefix.push(s);
        // The prefix was clean, so a new occurrence must end at the last symbol.
        if !spec.forbidden().ends_in(prefix) {
            extend_prefix(spec, n, prefix, out);
        }
        prefix.pop();
    }
}

/// Number of allowed `n`-blocks, counted over suffix states without
/// materializing any block. The empty block gives `count_blocks(_, 0) = 1`.
pub fn count_blocks(spec: &ShiftSpaceSpec, n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let seq = count_sequence(spec, n);
    seq.counts.into_iter().last().unwrap_or_default()
}

/// Counts for `n = 1 ..= n_max`.
pub fn count_sequence(spec: &ShiftSpaceSpec, n_max: usize) -> CountSequence {
    let k = spec.alphabet_size();
    let window = spec.forbidden().max_len().saturating_sub(1);

    let mut states: HashMap<Vec<Symbol>, BigUint> = HashMap::new();
    states.insert(Vec::new(), BigUint::one());
    let mut counts = Vec::with_capacity(n_max);
    let mut word = Vec::with_capacity(window + 1);

    for _ in 0..n_max {
        let mut next: HashMap<Vec<Symbol>, BigUint> = HashMap::with_capacity(states.len());
        for (state, ways) in &states {
            for s in 0..k {
                word.clear();
                word.extend_from_slice(state);
                word.push(s);
                if spec.forbidden().ends_in(&word) {
                    continue;
                }
                let keep = word.len().min(window);
                let key = word[word.len() - keep..].to_vec();
                *next.entry(key).or_insert_with(BigUint::zero) += ways;
            }
        }
        counts.push(next.values().sum());
        states = next;
    }
    CountSequence::new(1, counts)
}

/// The allowed `n`-blocks of a `T(m,k)` shift in the order of the inductive
/// construction: every `(n-1)`-block followed by `0`, then every
/// `(n-m-1)`-block followed by `0^m a` for each nonzero `a`. Lengths up to
/// two are listed lexicographically. Display order only.
pub fn enumerate_constructive(params: TmkParams, n: usize) -> Vec<Block> {
    let m = params.m() as usize;
    let k = params.k();
    let mut columns: Vec<Vec<Vec<Symbol>>> = Vec::with_capacity(n + 1);
    columns.push(vec![Vec::new()]);
    for len in 1..=n {
        let column = if len <= 2 {
            let spec = crate::shift::tmk_spec(params);
            enumerate_blocks_capped(&spec, len, u64::MAX)
                .expect("uncapped")
                .into_iter()
                .map(Block::into_symbols)
                .collect()
        } else {
            let mut column: Vec<Vec<Symbol>> = columns[len - 1]
                .iter()
                .map(|b| {
                    let mut w = b.clone();
                    w.push(0);
                    w
                })
                .collect();
            if len > m {
                for b in &columns[len - m - 1] {
                    for a in 1..k {
                        let mut w = b.clone();
                        w.extend(std::iter::repeat_n(0, m));
                        w.push(a);
                        column.push(w);
                    }
                }
            } else {
                // room for a single nonzero symbol only
                for a in 1..k {
                    let mut w = vec![0; len - 1];
                    w.push(a);
                    column.push(w);
                }
            }
            column
        };
        columns.push(column);
    }
    columns.swap_remove(n).into_iter().map(Block::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::{parse_block, tmk_spec};

    fn tmk(m: u32, k: u32) -> ShiftSpaceSpec {
        tmk_spec(TmkParams::new(m, k).unwrap())
    }

    fn three_symbol() -> ShiftSpaceSpec {
        ShiftSpaceSpec::new(
            3,
            [parse_block("11", 3).unwrap(), parse_block("22", 3).unwrap()],
        )
        .unwrap()
    }

    fn texts(blocks: &[Block]) -> Vec<String> {
        blocks.iter().map(|b| b.to_string()).collect()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn allowed_checks() {
        let golden = tmk(1, 2);
        assert!(is_allowed(&golden, &parse_block("0101", 2).unwrap()).unwrap());
        assert!(!is_allowed(&golden, &parse_block("0110", 2).unwrap()).unwrap());
        assert!(!is_allowed(&tmk(2, 3), &parse_block("102", 3).unwrap()).unwrap());
        assert!(is_allowed(&golden, &Block::empty()).unwrap());
        assert!(matches!(
            is_allowed(&golden, &Block::new(vec![0, 2])),
            Err(Error::OutOfAlphabet { symbol: 2, .. })
        ));
    }

    #[test]
    fn enumeration_fixtures() {
        assert_eq!(
            texts(&enumerate_blocks(&tmk(1, 2), 2).unwrap()),
            ["00", "01", "10"]
        );
        assert_eq!(
            texts(&enumerate_blocks(&tmk(2, 2), 3).unwrap()),
            ["000", "001", "010", "100"]
        );
        let full = ShiftSpaceSpec::full_shift(2).unwrap();
        assert_eq!(texts(&enumerate_blocks(&full, 1).unwrap()), ["0", "1"]);
        assert_eq!(enumerate_blocks(&full, 0).unwrap(), vec![Block::empty()]);
    }

    #[test]
    fn enumeration_cap() {
        let full = ShiftSpaceSpec::full_shift(2).unwrap();
        assert!(matches!(
            enumerate_blocks(&full, 25),
            Err(Error::ResourceLimit(_))
        ));
        assert!(enumerate_blocks_capped(&full, 4, 16).is_ok());
        assert!(enumerate_blocks_capped(&full, 5, 16).is_err());
    }

    #[test]
    fn count_fixtures() {
        assert_eq!(count_blocks(&tmk(1, 2), 4), big(8));
        assert_eq!(count_blocks(&tmk(2, 2), 5), big(9));
        assert_eq!(count_blocks(&three_symbol(), 4), big(41));
        assert_eq!(count_blocks(&tmk(1, 2), 0), big(1));
    }

    #[test]
    fn sequence_fixtures() {
        assert_eq!(
            count_sequence(&tmk(1, 2), 5),
            CountSequence::from_u64(1, &[2, 3, 5, 8, 13])
        );
        assert_eq!(
            count_sequence(&tmk(1, 21), 3),
            CountSequence::from_u64(1, &[21, 41, 461])
        );
        let full = ShiftSpaceSpec::full_shift(2).unwrap();
        assert_eq!(
            count_sequence(&full, 3),
            CountSequence::from_u64(1, &[2, 4, 8])
        );
    }

    #[test]
    fn single_symbol_forbidden() {
        let spec = ShiftSpaceSpec::new(3, [Block::new(vec![2])]).unwrap();
        assert_eq!(count_blocks(&spec, 5), big(32));
    }

    #[test]
    fn short_length_formula() {
        for m in 1..=4u32 {
            for k in 2..=6u32 {
                let seq = count_sequence(&tmk(m, k), m as usize + 1);
                for (n, c) in seq.iter() {
                    assert_eq!(*c, big(1 + n as u64 * (k as u64 - 1)), "m={m} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn constructive_order_matches_tables() {
        let golden: Vec<Vec<String>> = (1..=4)
            .map(|n| texts(&enumerate_constructive(TmkParams::new(1, 2).unwrap(), n)))
            .collect();
        assert_eq!(golden[2], ["000", "010", "100", "001", "101"]);
        assert_eq!(
            golden[3],
            ["0000", "0100", "1000", "0010", "1010", "0001", "0101", "1001"]
        );
        let lame = enumerate_constructive(TmkParams::new(2, 2).unwrap(), 5);
        assert_eq!(
            texts(&lame),
            ["00000", "01000", "10000", "00100", "00010", "10010", "00001", "01001", "10001"]
        );
        let lame4 = enumerate_constructive(TmkParams::new(2, 2).unwrap(), 4);
        assert_eq!(
            texts(&lame4),
            ["0000", "0100", "1000", "0010", "0001", "1001"]
        );
    }

    #[test]
    fn constructive_is_a_permutation_of_lex() {
        for (m, k) in [(1, 2), (2, 3), (3, 2), (1, 4)] {
            let p = TmkParams::new(m, k).unwrap();
            for n in 0..=7 {
                let mut c = enumerate_constructive(p, n);
                c.sort();
                assert_eq!(c, enumerate_blocks(&tmk(m, k), n).unwrap());
            }
        }
    }
}
