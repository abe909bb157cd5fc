//! Choosing `T(m,k)` parameters for a target limit ratio or entropy.

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{dominant_root, entropy_tmk, LogBase, DEFAULT_ROOT_TOL};

/// Distance from an integer below which `k*` is accepted as integral.
pub const INTEGRALITY_TOL: f64 = 1e-9;

/// Deviation below which a design is flagged exact.
pub const EXACT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DesignResult {
    pub m: u32,
    pub k: u32,
    pub lambda0: f64,
    pub entropy: f64,
    pub deviation: f64,
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyRow {
    pub m: u32,
    pub k: u32,
    pub lambda0: f64,
    pub entropy: f64,
}

/// The alphabet size giving dominant root `lambda_target` at separation `m`:
/// `k = λ^(m+1) - λ^m + 1`, when that is an integer `>= 2`.
pub fn k_for_target_ratio(lambda_target: f64, m: u32) -> Option<u32> {
    if !(lambda_target > 1.0) || m < 1 || !lambda_target.is_finite() {
        return None;
    }
    let k_star = lambda_target.powi(m as i32) * (lambda_target - 1.0) + 1.0;
    let k = k_star.round();
    if (k_star - k).abs() >= INTEGRALITY_TOL || k < 2.0 || k > u32::MAX as f64 {
        return None;
    }
    let k = k as u32;
    let root = dominant_root(m, k, DEFAULT_ROOT_TOL).ok()?;
    ((root - lambda_target).abs() < 1e-9).then_some(k)
}

fn check_ranges(m_range: &RangeInclusive<u32>, k_range: &RangeInclusive<u32>) -> Result<()> {
    if m_range.is_empty() || *m_range.start() < 1 {
        return Err(Error::ParameterDomain(format!(
            "m range {}..{} must be nonempty and start at 1 or more",
            m_range.start(),
            m_range.end()
        )));
    }
    if k_range.is_empty() || *k_range.start() < 2 {
        return Err(Error::ParameterDomain(format!(
            "k range {}..{} must be nonempty and start at 2 or more",
            k_range.start(),
            k_range.end()
        )));
    }
    Ok(())
}

/// Every `(m, k)` in the ranges whose entropy is within `tol` of `h_target`,
/// sorted by deviation and then by `(m, k)`.
pub fn design_for_entropy(
    h_target: f64,
    base: LogBase,
    m_range: RangeInclusive<u32>,
    k_range: RangeInclusive<u32>,
    tol: f64,
) -> Result<Vec<DesignResult>> {
    if !(h_target > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "target entropy {h_target} must be positive"
        )));
    }
    if !(tol >= 0.0) {
        return Err(Error::ParameterDomain(format!(
            "tolerance {tol} must be nonnegative"
        )));
    }
    check_ranges(&m_range, &k_range)?;

    let mut out = Vec::new();
    for m in m_range {
        for k in k_range.clone() {
            let report = entropy_tmk(m, k, base, DEFAULT_ROOT_TOL)?;
            let deviation = (report.entropy - h_target).abs();
            if deviation <= tol {
                out.push(DesignResult {
                    m,
                    k,
                    lambda0: report.lambda0,
                    entropy: report.entropy,
                    deviation,
                    exact: deviation < EXACT_TOL,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        a.deviation
            .total_cmp(&b.deviation)
            .then_with(|| (a.m, a.k).cmp(&(b.m, b.k)))
    });
    Ok(out)
}

/// Same as [`design_for_entropy`] with the target given as a limit ratio.
pub fn design_for_ratio(
    lambda_target: f64,
    m_range: RangeInclusive<u32>,
    k_range: RangeInclusive<u32>,
    tol: f64,
) -> Result<Vec<DesignResult>> {
    if !(lambda_target > 1.0) {
        return Err(Error::ParameterDomain(format!(
            "target ratio {lambda_target} must exceed 1"
        )));
    }
    design_for_entropy(lambda_target.ln(), LogBase::E, m_range, k_range, tol)
}

/// One row per `(m, k)`, `m`-major.
pub fn entropy_table(
    m_range: RangeInclusive<u32>,
    k_range: RangeInclusive<u32>,
    base: LogBase,
) -> Result<Vec<EntropyRow>> {
    check_ranges(&m_range, &k_range)?;
    let mut rows = Vec::new();
    for m in m_range {
        for k in k_range.clone() {
            let r = entropy_tmk(m, k, base, DEFAULT_ROOT_TOL)?;
            rows.push(EntropyRow {
                m,
                k,
                lambda0: r.lambda0,
                entropy: r.entropy,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn target_ratio() {
        assert_eq!(k_for_target_ratio(5.0, 1), Some(21));
        assert_eq!(k_for_target_ratio(2.0, 2), Some(5));
        assert_eq!(k_for_target_ratio(2.0, 1), Some(3));
        assert_eq!(k_for_target_ratio(1.5, 1), None);
        assert_eq!(k_for_target_ratio(1.0, 1), None);
        assert_eq!(k_for_target_ratio(f64::NAN, 1), None);
        // golden ratio gives k* = 2 up to rounding
        assert_eq!(k_for_target_ratio((1.0 + 5f64.sqrt()) / 2.0, 1), Some(2));
    }

    #[test]
    fn integer_ratio_round_trip() {
        for lambda in 2..=6u32 {
            for m in 1..=4u32 {
                let expected = lambda.pow(m + 1) - lambda.pow(m) + 1;
                let k = k_for_target_ratio(lambda as f64, m).unwrap();
                assert_eq!(k, expected);
                assert!((dominant_root(m, k, 1e-12).unwrap() - lambda as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn entropy_design() {
        let found = design_for_entropy(LN_2, LogBase::E, 1..=3, 2..=30, 1e-9).unwrap();
        let cells: Vec<(u32, u32, bool)> = found.iter().map(|d| (d.m, d.k, d.exact)).collect();
        let mut sorted = cells.clone();
        sorted.sort();
        assert_eq!(sorted, [(1, 3, true), (2, 5, true), (3, 9, true)]);

        let five = design_for_entropy(5f64.ln(), LogBase::E, 1..=1, 2..=30, 1e-9).unwrap();
        assert_eq!(five.len(), 1);
        assert_eq!((five[0].m, five[0].k), (1, 21));

        assert!(design_for_entropy(10.0, LogBase::E, 1..=4, 2..=30, 1e-3)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn design_results_recheck() {
        let found = design_for_entropy(1.0, LogBase::Two, 1..=4, 2..=40, 0.05).unwrap();
        assert!(!found.is_empty());
        for pair in found.windows(2) {
            assert!(pair[0].deviation <= pair[1].deviation);
        }
        for d in &found {
            let fresh = entropy_tmk(d.m, d.k, LogBase::Two, 1e-12).unwrap();
            assert!((fresh.entropy - 1.0).abs() <= 0.05);
            assert_eq!(fresh.entropy, d.entropy);
        }
    }

    #[test]
    fn design_argument_errors() {
        assert!(design_for_entropy(0.0, LogBase::E, 1..=2, 2..=3, 1e-9).is_err());
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 3..=2;
        assert!(design_for_entropy(1.0, LogBase::E, empty, 2..=3, 1e-9).is_err());
        assert!(design_for_entropy(1.0, LogBase::E, 0..=2, 2..=3, 1e-9).is_err());
        assert!(design_for_ratio(0.5, 1..=2, 2..=3, 1e-9).is_err());
    }

    #[test]
    fn ratio_design() {
        let found = design_for_ratio(2.0, 1..=4, 2..=20, 1e-9).unwrap();
        let cells: Vec<(u32, u32)> = found.iter().map(|d| (d.m, d.k)).collect();
        assert_eq!(cells.len(), 4);
        for (m, k) in [(1, 3), (2, 5), (3, 9), (4, 17)] {
            assert!(cells.contains(&(m, k)));
        }
    }

    #[test]
    fn table_rows() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let rows = entropy_table(1..=1, 2..=3, LogBase::E).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].m, rows[0].k), (1, 2));
        assert!((rows[0].lambda0 - phi).abs() < 1e-12);
        assert!((rows[0].entropy - 0.481_211_825_059_603_4).abs() < 1e-12);
        assert_eq!(rows[1].lambda0, 2.0);
        assert!((rows[1].entropy - LN_2).abs() < 1e-12);

        let rows = entropy_table(2..=2, 5..=5, LogBase::E).unwrap();
        assert!((rows[0].lambda0 - 2.0).abs() < 1e-12);

        let rows = entropy_table(1..=1, 2..=2, LogBase::Two).unwrap();
        assert!((rows[0].entropy - 0.694_241_913_630_617_3).abs() < 1e-12);

        let grid = entropy_table(1..=3, 2..=6, LogBase::Ten).unwrap();
        let order: Vec<(u32, u32)> = grid.iter().map(|r| (r.m, r.k)).collect();
        let mut expected = Vec::new();
        for m in 1..=3 {
            for k in 2..=6 {
                expected.push((m, k));
            }
        }
        assert_eq!(order, expected);
        for r in &grid {
            assert_eq!(
                r.entropy,
                entropy_tmk(r.m, r.k, LogBase::Ten, 1e-12).unwrap().entropy
            );
        }
    }
}
