//! Closed-form buyer surplus and seller revenue in a second-price auction
//! with i.i.d. valuations.
//!
//! Bidder-count convention: every public function takes `m`, the number of
//! bidders in the auction, except the add-a-bidder functions
//! ([`surplus_delta_closed`], [`marginal_revenue`], [`marginal_revenue_rate`]),
//! which take `n`, the bidder count *before* the addition. Those compare an
//! `n`-bidder auction with an `(n+1)`-bidder one, i.e. their order statistics
//! are over `n+1` draws.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::distributions::{Family, ValuationDistribution};
use crate::error::{Error, Result};
use crate::format::csv_num;
use crate::orderstats::{expected_rank, harmonic, pareto_g, EULER_GAMMA};
use crate::special::gamma;

/// CSV header of [`SurplusRevenueTable`].
pub const TABLE_HEADER: &str = "m,buyer_surplus,seller_revenue,per_bidder_surplus,marginal_revenue";

fn require_bidders(m: u64, min: u64, what: &str) -> Result<()> {
    if m < min {
        return Err(Error::InvalidParameter(format!("{what} needs at least {min} bidders, got {m}")));
    }
    Ok(())
}

fn equal_revenue_surplus_error(dist: &ValuationDistribution) -> Error {
    Error::InfiniteMean(format!("{dist}: shape v = 1, so expected buyer surplus is infinite"))
}

/// `E p_m = E X_(m) - E X_(m-1)` over `m` draws.
pub fn expected_buyer_surplus(dist: &ValuationDistribution, m: u64) -> Result<f64> {
    require_bidders(m, 2, "expected buyer surplus")?;
    match dist.family() {
        Family::Exponential { rate } => Ok(1.0 / rate),
        Family::Uniform { lo, hi } => Ok((hi - lo) / (m + 1) as f64),
        Family::ParetoI { scale, shape } => {
            if shape <= 1.0 {
                return Err(equal_revenue_surplus_error(dist));
            }
            Ok(pareto_g(m - 1, scale, shape)? / shape)
        }
    }
}

/// `E s_m = E X_(m-1)` over `m` draws (the runner-up valuation).
///
/// For the equal-revenue Pareto (`v = 1`) this is the finite limit `a·m`.
pub fn expected_seller_revenue(dist: &ValuationDistribution, m: u64) -> Result<f64> {
    require_bidders(m, 2, "expected seller revenue")?;
    let mf = m as f64;
    match dist.family() {
        Family::Exponential { rate } => Ok((harmonic(m) - 1.0) / rate),
        Family::Uniform { lo, hi } => Ok(lo + (hi - lo) * (mf - 1.0) / (mf + 1.0)),
        Family::ParetoI { scale, shape } => {
            if shape <= 1.0 {
                Ok(scale * mf)
            } else {
                Ok(pareto_g(m - 1, scale, shape)? * (1.0 - 1.0 / shape))
            }
        }
    }
}

/// Expected change in buyer surplus from adding bidder `n+1` to `n` bidders:
/// `(1/(n+1)) [E(X_(n+1) - X_(n)) - 2 E(X_(n) - X_(n-1))]` over `n+1` draws.
pub fn surplus_delta_closed(dist: &ValuationDistribution, n: u64) -> Result<f64> {
    require_bidders(n, 2, "surplus delta")?;
    match dist.family() {
        Family::Exponential { .. } => Ok(0.0),
        Family::ParetoI { scale, shape } => {
            if shape <= 1.0 {
                return Err(equal_revenue_surplus_error(dist));
            }
            Ok(pareto_g(n, scale, shape)? / (shape * shape * (n + 1) as f64))
        }
        Family::Uniform { .. } => surplus_delta_from_order_stats(dist, n),
    }
}

/// The add-a-bidder surplus change evaluated term by term from expected
/// order statistics, valid for any family with finite means.
pub fn surplus_delta_from_order_stats(dist: &ValuationDistribution, n: u64) -> Result<f64> {
    require_bidders(n, 2, "surplus delta")?;
    let m = n + 1;
    let top = expected_rank(dist, m, m)?;
    let second = expected_rank(dist, m, m - 1)?;
    let third = expected_rank(dist, m, m - 2)?;
    Ok(((top - second) - 2.0 * (second - third)) / m as f64)
}

/// Ratio of expected seller revenue to expected buyer surplus with `m` bidders.
///
/// Exponential gives `H_m - 1`, Pareto gives exactly `v - 1`.
pub fn revenue_surplus_ratio(dist: &ValuationDistribution, m: u64) -> Result<f64> {
    require_bidders(m, 2, "revenue/surplus ratio")?;
    match dist.family() {
        Family::Exponential { .. } => Ok(harmonic(m) - 1.0),
        Family::ParetoI { shape, .. } if shape <= 1.0 => Err(equal_revenue_surplus_error(dist)),
        _ => Ok(expected_seller_revenue(dist, m)? / expected_buyer_surplus(dist, m)?),
    }
}

/// `ln m + γ - 1`, the large-`m` approximation of the exponential ratio.
pub fn exponential_ratio_asymptotic(m: u64) -> f64 {
    (m as f64).ln() + EULER_GAMMA - 1.0
}

/// `E p_m / m`: each bidder's expected surplus, by symmetry.
pub fn per_bidder_surplus(dist: &ValuationDistribution, m: u64) -> Result<f64> {
    Ok(expected_buyer_surplus(dist, m)? / m as f64)
}

/// `s_{n+1} - s_n`, exact.
pub fn marginal_revenue(dist: &ValuationDistribution, n: u64) -> Result<f64> {
    require_bidders(n, 2, "marginal revenue")?;
    let nf = n as f64;
    match dist.family() {
        Family::Uniform { lo, hi } => Ok((hi - lo) * 2.0 / (nf * nf + 3.0 * nf + 2.0)),
        Family::Exponential { rate } => Ok(1.0 / (rate * (nf + 1.0))),
        Family::ParetoI { scale, shape } => {
            if shape <= 1.0 {
                return Ok(scale);
            }
            // s_m = a Γ(2-δ) R(m) with R(m+1) = R(m)(m+1)/(m+1-δ), so the
            // difference is s_n · δ/(n+1-δ) without cancellation.
            let delta = 1.0 / shape;
            Ok(expected_seller_revenue(dist, n)? * delta / (nf + 1.0 - delta))
        }
    }
}

/// Asymptotic order of `s_{n+1} - s_n` in `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum RateClass {
    /// `O(1/n²)`
    InverseSquare,
    /// `O(1/n)`
    Inverse,
    /// `O(n^-exponent)` with `exponent = 1 - 1/v ∈ [0, 1)`; `0` is constant.
    PowerLaw { exponent: f64 },
}

impl fmt::Display for RateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RateClass::InverseSquare => write!(f, "1/n²"),
            RateClass::Inverse => write!(f, "1/n"),
            RateClass::PowerLaw { exponent: 0.0 } => write!(f, "constant"),
            RateClass::PowerLaw { exponent: 0.5 } => write!(f, "1/√n"),
            RateClass::PowerLaw { exponent } => write!(f, "1/n^{exponent}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalRate {
    pub approx_value: f64,
    pub order_class: RateClass,
}

/// Leading-order marginal revenue and its rate class.
///
/// Uniform and exponential use their exact expressions; Pareto uses
/// `a Γ(2-1/v) [(n+1)^{1/v} - n^{1/v}]`, obtained from the
/// `Γ(m+1)/Γ(m+1-1/v) ≈ m^{1/v}` approximation.
pub fn marginal_revenue_rate(dist: &ValuationDistribution, n: u64) -> Result<MarginalRate> {
    require_bidders(n, 2, "marginal revenue rate")?;
    let nf = n as f64;
    Ok(match dist.family() {
        Family::Uniform { .. } | Family::Exponential { .. } => MarginalRate {
            approx_value: marginal_revenue(dist, n)?,
            order_class: if matches!(dist.family(), Family::Uniform { .. }) {
                RateClass::InverseSquare
            } else {
                RateClass::Inverse
            },
        },
        Family::ParetoI { scale, shape } => {
            let delta = 1.0 / shape;
            MarginalRate {
                approx_value: scale * gamma(2.0 - delta) * ((nf + 1.0).powf(delta) - nf.powf(delta)),
                order_class: RateClass::PowerLaw { exponent: 1.0 - delta },
            }
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub m: u64,
    pub buyer_surplus: f64,
    pub seller_revenue: f64,
    pub per_bidder_surplus: f64,
    pub marginal_revenue: f64,
}

/// Expected surplus and revenue per bidder count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurplusRevenueTable {
    pub dist: ValuationDistribution,
    pub rows: Vec<TableRow>,
}

pub fn build_table(dist: &ValuationDistribution, m_min: u64, m_max: u64) -> Result<SurplusRevenueTable> {
    if m_min < 2 || m_min > m_max {
        return Err(Error::InvalidParameter(format!(
            "table range must satisfy 2 <= m_min <= m_max, got {m_min}..{m_max}"
        )));
    }
    let rows = (m_min..=m_max)
        .map(|m| {
            Ok(TableRow {
                m,
                buyer_surplus: expected_buyer_surplus(dist, m)?,
                seller_revenue: expected_seller_revenue(dist, m)?,
                per_bidder_surplus: per_bidder_surplus(dist, m)?,
                marginal_revenue: marginal_revenue(dist, m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurplusRevenueTable { dist: *dist, rows })
}

impl SurplusRevenueTable {
    /// Header line plus one row per bidder count, 12 significant digits, LF endings.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{TABLE_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.m,
                csv_num(r.buyer_surplus),
                csv_num(r.seller_revenue),
                csv_num(r.per_bidder_surplus),
                csv_num(r.marginal_revenue)
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Parse rows in the [`TABLE_HEADER`] layout. Lines starting with `#` are skipped.
pub fn parse_table_csv(text: &str) -> Result<Vec<TableRow>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some(h) if h == TABLE_HEADER => {}
        Some(h) => return Err(Error::Parse(format!("expected header `{TABLE_HEADER}`, found `{h}`"))),
        None => return Err(Error::Parse("empty table".into())),
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(Error::Parse(format!("row {}: expected 5 columns, found {}", k + 1, cols.len())));
            }
            let num = |s: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {}: `{s}`: {e}", k + 1)))
            };
            Ok(TableRow {
                m: cols[0].trim().parse().map_err(|e| Error::Parse(format!("row {}: bidder count: {e}", k + 1)))?,
                buyer_surplus: num(cols[1])?,
                seller_revenue: num(cols[2])?,
                per_bidder_surplus: num(cols[3])?,
                marginal_revenue: num(cols[4])?,
            })
        })
        .collect()
}
