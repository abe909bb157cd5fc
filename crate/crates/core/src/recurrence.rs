//! Exact linear recurrences for block counts.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::enumerate::CountSequence;
use crate::error::{Error, Result};
use crate::shift::TmkParams;

/// `a_n = c_1 a_(n-1) + ... + c_d a_(n-d)` with `a_offset .. a_(offset+d-1)` given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRecurrence {
    coefficients: Vec<BigInt>,
    initial_terms: Vec<BigInt>,
    offset: usize,
}

impl LinearRecurrence {
    pub fn new(
        coefficients: Vec<BigInt>,
        initial_terms: Vec<BigInt>,
        offset: usize,
    ) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::ParameterDomain(
                "recurrence order must be at least 1".into(),
            ));
        }
        if coefficients.len() != initial_terms.len() {
            return Err(Error::ParameterDomain(format!(
                "{} coefficients but {} initial terms",
                coefficients.len(),
                initial_terms.len()
            )));
        }
        if coefficients.last().is_some_and(Zero::is_zero) {
            return Err(Error::ParameterDomain(
                "last coefficient must be nonzero".into(),
            ));
        }
        Ok(LinearRecurrence {
            coefficients,
            initial_terms,
            offset,
        })
    }

    pub fn from_i64(coefficients: &[i64], initial_terms: &[i64]) -> Result<Self> {
        Self::new(
            coefficients.iter().map(|&c| BigInt::from(c)).collect(),
            initial_terms.iter().map(|&t| BigInt::from(t)).collect(),
            1,
        )
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn initial_terms(&self) -> &[BigInt] {
        &self.initial_terms
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Terms `a_offset ..= a_n_max`.
    pub fn terms(&self, n_max: usize) -> Vec<BigInt> {
        if n_max < self.offset {
            return Vec::new();
        }
        let count = n_max - self.offset + 1;
        let d = self.order();
        let mut terms: Vec<BigInt> = self.initial_terms.iter().take(count).cloned().collect();
        while terms.len() < count {
            let n = terms.len();
            let next = self
                .coefficients
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| c * &terms[n - 1 - i])
                .sum();
            terms.push(next);
            debug_assert!(terms.len() > d);
        }
        terms
    }

    /// `a_n`; `None` below the offset.
    pub fn evaluate(&self, n: usize) -> Option<BigInt> {
        self.terms(n).pop().filter(|_| n >= self.offset)
    }
}

impl fmt::Display for LinearRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a(n) =")?;
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                write!(f, " {}", if c.is_negative() { "-" } else { "" })?;
            } else {
                write!(f, " {sign} ")?;
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "a(n-{})", i + 1)?;
            first = false;
        }
        let init: Vec<String> = self
            .initial_terms
            .iter()
            .enumerate()
            .map(|(i, t)| format!("a({})={t}", self.offset + i))
            .collect();
        write!(f, "; {}", init.join(", "))
    }
}

/// `a_n = a_(n-1) + (k-1) a_(n-m-1)`, seeded with `a_n = 1 + n(k-1)` for `n <= m+1`.
pub fn tmk_recurrence(params: TmkParams) -> LinearRecurrence {
    let order = params.m() as usize + 1;
    let k1 = BigInt::from(params.k() - 1);
    let mut coefficients = vec![BigInt::zero(); order];
    coefficients[0] += 1;
    coefficients[order - 1] += &k1;
    let initial_terms = (1..=order).map(|n| BigInt::one() + &k1 * n).collect();
    LinearRecurrence::new(coefficients, initial_terms, 1).expect("well-formed by construction")
}

pub fn evaluate(rec: &LinearRecurrence, n: usize) -> Result<BigInt> {
    rec.evaluate(n).ok_or_else(|| {
        Error::ParameterDomain(format!(
            "index {n} is below the recurrence offset {}",
            rec.offset
        ))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerificationReport {
    /// Every term from `n_min` to `n_max` agrees.
    AllMatch { n_min: usize, n_max: usize },
    Mismatch {
        n: usize,
        recurrence: BigInt,
        observed: BigUint,
    },
    /// Too few terms to say anything beyond the initial conditions.
    Inconclusive { available: usize, required: usize },
}

impl VerificationReport {
    pub fn is_match(&self) -> bool {
        matches!(self, VerificationReport::AllMatch { .. })
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerificationReport::AllMatch { n_min, n_max } => {
                write!(f, "all terms match for n = {n_min}..{n_max}")
            }
            VerificationReport::Mismatch {
                n,
                recurrence,
                observed,
            } => write!(
                f,
                "mismatch at n = {n}: recurrence gives {recurrence}, observed {observed}"
            ),
            VerificationReport::Inconclusive {
                available,
                required,
            } => write!(
                f,
                "inconclusive: {available} terms available, {required} required"
            ),
        }
    }
}

/// Compares every term of `counts` with the recurrence.
pub fn verify_recurrence(rec: &LinearRecurrence, counts: &CountSequence) -> VerificationReport {
    let required = rec.order() + 1;
    if counts.len() < required {
        return VerificationReport::Inconclusive {
            available: counts.len(),
            required,
        };
    }
    let n_max = counts.n_max().expect("nonempty");
    let terms = rec.terms(n_max);
    for (n, observed) in counts.iter() {
        let expected = n
            .checked_sub(rec.offset)
            .and_then(|i| terms.get(i))
            .cloned()
            .unwrap_or_default();
        if expected != BigInt::from(observed.clone()) {
            return VerificationReport::Mismatch {
                n,
                recurrence: expected,
                observed: observed.clone(),
            };
        }
    }
    VerificationReport::AllMatch {
        n_min: counts.n_min,
        n_max,
    }
}

/// Smallest-order recurrence with integer coefficients fitting every term, or
/// `None`. Orders are tried up to `max_order`, further limited so that each
/// candidate is overdetermined by at least two equations.
pub fn infer_recurrence(counts: &CountSequence, max_order: usize) -> Option<LinearRecurrence> {
    let seq: Vec<BigRational> = counts
        .counts
        .iter()
        .map(|c| BigRational::from_integer(BigInt::from(c.clone())))
        .collect();
    let usable = counts.len().saturating_sub(2) / 2;
    for d in 1..=max_order.min(usable) {
        let rows: Vec<Vec<BigRational>> = (d..seq.len())
            .map(|n| {
                let mut row: Vec<BigRational> = (1..=d).map(|i| seq[n - i].clone()).collect();
                row.push(seq[n].clone());
                row
            })
            .collect();
        let Some(solution) = solve_consistent(rows, d) else {
            continue;
        };
        if !solution.iter().all(BigRational::is_integer) {
            continue;
        }
        let coefficients: Vec<BigInt> = solution.iter().map(BigRational::to_integer).collect();
        if coefficients[d - 1].is_zero() {
            continue;
        }
        let initial_terms = counts.counts[..d]
            .iter()
            .map(|c| BigInt::from(c.clone()))
            .collect();
        let rec = LinearRecurrence::new(coefficients, initial_terms, counts.n_min).ok()?;
        if verify_recurrence(&rec, counts).is_match() {
            return Some(rec);
        }
    }
    None
}

/// Gauss–Jordan elimination on an augmented system with `vars` unknowns.
/// Returns a solution (free variables set to zero) or `None` when inconsistent.
fn solve_consistent(mut rows: Vec<Vec<BigRational>>, vars: usize) -> Option<Vec<BigRational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..vars {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[vars].is_zero()) {
        return None;
    }
    let mut solution = vec![BigRational::zero(); vars];
    for (i, &col) in pivots.iter().enumerate() {
        solution[col] = rows[i][vars].clone();
    }
    Some(solution)
}

/// Counts for three symbols with `11` and `22` forbidden, built from
/// `a_1 = 3` and `a_n = a_(n-1) + 2 (a_(n-2) + ... + a_1) + 4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumRecurrenceSequence {
    pub terms: Vec<BigUint>,
}

pub fn sum_recurrence_three_symbol(n_max: usize) -> SumRecurrenceSequence {
    let mut terms: Vec<BigUint> = Vec::with_capacity(n_max);
    // running a_1 + ... + a_(n-2)
    let mut older = BigUint::zero();
    for n in 1..=n_max {
        let next = if n == 1 {
            BigUint::from(3u32)
        } else {
            if n >= 3 {
                older += &terms[n - 3];
            }
            &terms[n - 2] + &older * 2u32 + 4u32
        };
        terms.push(next);
    }
    SumRecurrenceSequence { terms }
}

/// `a_n / a_(n-1)` rounded to the nearest `f64`.
pub fn limit_ratio(rec: &LinearRecurrence, n: usize) -> Result<f64> {
    if n < rec.offset + 1 {
        return Err(Error::ParameterDomain(format!(
            "ratio needs n >= {}, got {n}",
            rec.offset + 1
        )));
    }
    let terms = rec.terms(n);
    let (num, den) = (&terms[terms.len() - 1], &terms[terms.len() - 2]);
    if den.is_zero() {
        return Err(Error::Numeric(format!("a({}) is zero", n - 1)));
    }
    BigRational::new(num.clone(), den.clone())
        .to_f64()
        .ok_or_else(|| Error::Numeric("ratio is not representable".into()))
}
