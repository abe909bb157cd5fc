//! Dominant root of `λ^(m+1) - λ^m - (k-1)` and entropies derived from it.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::shift::TmkParams;

/// Default absolute tolerance for polynomial roots.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

const BISECTION_WIDTH: f64 = 1e-3;
const NEWTON_MAX_ITER: usize = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    E,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "10")]
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::E => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::E => "e",
            LogBase::Two => "2",
            LogBase::Ten => "10",
        })
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "E" | "ln" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            "10" => Ok(LogBase::Ten),
            other => Err(Error::Parse(format!(
                "unknown log base {other:?}; expected e, 2 or 10"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Polynomial,
    TransferMatrix,
    ClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Polynomial => "polynomial",
            Method::TransferMatrix => "transfer-matrix",
            Method::ClosedForm => "closed-form",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub lambda0: f64,
    pub entropy: f64,
    pub log_base: LogBase,
    pub method: Method,
    /// `|p(lambda0)|` for root-based methods, the eigenvalue bracket width
    /// for the transfer matrix.
    pub residual: f64,
}

/// `p(λ) = λ^(m+1) - λ^m - (k-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharacteristicPolynomial {
    m: u32,
    k: u32,
}

impl CharacteristicPolynomial {
    pub fn new(params: TmkParams) -> Self {
        CharacteristicPolynomial {
            m: params.m(),
            k: params.k(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        x.powi(self.m as i32) * (x - 1.0) - (self.k - 1) as f64
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let m = self.m as f64;
        x.powi(self.m as i32 - 1) * ((m + 1.0) * x - m)
    }

    /// Largest real root, within `tol`. It lies in `(1, k]` since `p(1) < 0 <= p(k)`.
    pub fn dominant_root(&self, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::ParameterDomain(format!(
                "tolerance {tol} must be positive"
            )));
        }
        let (mut lo, mut hi) = (1.0, self.k as f64);
        if self.eval(hi) == 0.0 {
            return Ok(hi);
        }
        let width = BISECTION_WIDTH.max(tol);
        while hi - lo > width {
            let mid = 0.5 * (lo + hi);
            let v = self.eval(mid);
            if v == 0.0 {
                return Ok(mid);
            }
            if v < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        // p is increasing and convex on the bracket, so Newton from the right
        // end stays inside it.
        let mut x = hi;
        for _ in 0..NEWTON_MAX_ITER {
            let step = self.eval(x) / self.derivative(x);
            let next = (x - step).clamp(lo, hi);
            let moved = (next - x).abs();
            x = next;
            if moved <= tol * 1e-3 || moved == 0.0 {
                return Ok(x);
            }
        }
        if self.eval(x).abs() <= 10.0 * tol * self.derivative(x).abs() {
            Ok(x)
        } else {
            Err(Error::NonConvergence {
                iterations: NEWTON_MAX_ITER,
                last: x,
                residual: self.eval(x).abs(),
            })
        }
    }
}

/// Largest root of `λ^(m+1) = λ^m + (k-1)`. For `m = 1` the result is
/// checked against the closed form.
pub fn dominant_root(m: u32, k: u32, tol: f64) -> Result<f64> {
    let params = TmkParams::new(m, k)?;
    let root = CharacteristicPolynomial::new(params).dominant_root(tol)?;
    if m == 1 {
        let closed = closed_form_root_m1(k)?;
        // a few ulps of slack at large k
        let slack = tol.max(8.0 * f64::EPSILON * closed);
        if (root - closed).abs() > 10.0 * slack {
            return Err(Error::Numeric(format!(
                "root {root} disagrees with closed form {closed} for k = {k}"
            )));
        }
    }
    Ok(root)
}

/// `(1 + √(4k-3)) / 2`, the dominant root when `m = 1`.
pub fn closed_form_root_m1(k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::ParameterDomain(format!(
            "k = {k}, must be at least 2"
        )));
    }
    Ok((1.0 + (4.0 * k as f64 - 3.0).sqrt()) / 2.0)
}

pub fn entropy_tmk(m: u32, k: u32, base: LogBase, tol: f64) -> Result<EntropyReport> {
    let params = TmkParams::new(m, k)?;
    let lambda0 = dominant_root(m, k, tol)?;
    Ok(EntropyReport {
        lambda0,
        entropy: base.log(lambda0),
        log_base: base,
        method: if m == 1 {
            Method::ClosedForm
        } else {
            Method::Polynomial
        },
        residual: CharacteristicPolynomial::new(params).eval(lambda0).abs(),
    })
}
