//! Expected order statistics in closed form.
//!
//! Ranks run from least to greatest: for `m` draws, rank 1 is the minimum and
//! rank `m` the maximum.

use serde::{Deserialize, Serialize};

use crate::distributions::{Family, ValuationDistribution};
use crate::error::{Error, Result};
pub use crate::special::{harmonic, EULER_GAMMA};
use crate::special::{gamma, ln_gamma_diff};

/// The `rank`-th smallest of `samples` i.i.d. draws from `dist`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderStatQuery {
    pub dist: ValuationDistribution,
    pub samples: u64,
    pub rank: u64,
}

impl OrderStatQuery {
    pub fn new(dist: ValuationDistribution, samples: u64, rank: u64) -> Result<Self> {
        if samples == 0 || rank == 0 || rank > samples {
            return Err(Error::InvalidParameter(format!(
                "order statistic rank must satisfy 1 <= i <= m, got i={rank}, m={samples}"
            )));
        }
        Ok(Self { dist, samples, rank })
    }
}

/// `Γ(m+1) / Γ(m+1-1/v)`, evaluated as a difference of log-gammas.
pub fn log_gamma_ratio(m: u64, v: f64) -> Result<f64> {
    if v.is_nan() || v <= 1.0 {
        return Err(Error::InfiniteMean(format!("gamma ratio needs shape v > 1, got {v}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("gamma ratio needs m >= 1".into()));
    }
    Ok(ln_gamma_diff(m as f64 + 1.0, 1.0 / v).exp())
}

/// `(n+1)^{1/v}`, the large-`n` approximation of `Γ(n+2)/Γ(n+2-1/v)`.
pub fn gamma_ratio_approx(n: u64, v: f64) -> f64 {
    ((n + 1) as f64).powf(1.0 / v)
}

/// Relative error of [`gamma_ratio_approx`] against the exact ratio.
pub fn gamma_ratio_approx_error(n: u64, v: f64) -> Result<f64> {
    let exact = log_gamma_ratio(n + 1, v)?;
    Ok((gamma_ratio_approx(n, v) - exact).abs() / exact)
}

/// `g(n, a, v) = a · Γ(n+2)/Γ(n+2-1/v) · Γ(1-1/v)`: the expected maximum of
/// `n+1` Pareto draws.
pub fn pareto_g(n: u64, a: f64, v: f64) -> Result<f64> {
    if v.is_nan() || v <= 1.0 {
        return Err(Error::InfiniteMean(format!(
            "pareto shape v={v} <= 1 makes the expected top order statistic infinite"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("pareto_g needs n >= 1".into()));
    }
    Ok(a * log_gamma_ratio(n + 1, v)? * gamma(1.0 - 1.0 / v))
}

/// `E X_(i)` for `m` draws.
///
/// * Exponential: Rényi sum `(1/λ) Σ_{j=1..i} 1/(m-j+1)`.
/// * Uniform `[lo, hi]`: `lo + (hi-lo) · i/(m+1)`.
/// * Pareto: `a · Π_{k=m-i+1..m} k/(k-1/v)`, which is the gamma form
///   `a · m!/(m-i)! · Γ(m+1-i-1/v)/Γ(m+1-1/v)` telescoped into a product.
///   Finite iff `m+1-i-1/v > 0`; only the maximum with `v = 1` diverges.
pub fn expected_order_stat(q: &OrderStatQuery) -> Result<f64> {
    let (m, i) = (q.samples, q.rank);
    match q.dist.family() {
        Family::Exponential { rate } => {
            let s: f64 = (1..=i).rev().map(|j| 1.0 / (m - j + 1) as f64).sum();
            Ok(s / rate)
        }
        Family::Uniform { lo, hi } => Ok(lo + (hi - lo) * i as f64 / (m + 1) as f64),
        Family::ParetoI { scale, shape } => {
            let delta = 1.0 / shape;
            if (m + 1 - i) as f64 - delta <= 0.0 {
                return Err(Error::InfiniteMean(format!(
                    "E X_({i}) of {m} draws from {} diverges (needs m+1-i-1/v > 0)",
                    q.dist
                )));
            }
            let log_prod: f64 = (m - i + 1..=m).map(|k| -(-delta / k as f64).ln_1p()).sum();
            Ok(scale * log_prod.exp())
        }
    }
}

/// Shorthand for [`expected_order_stat`] without building a query by hand.
pub fn expected_rank(dist: &ValuationDistribution, samples: u64, rank: u64) -> Result<f64> {
    expected_order_stat(&OrderStatQuery::new(*dist, samples, rank)?)
}
