//! Reserve prices in second-price auctions: Myerson reserves, revenue and
//! surplus under a reserve, and how the revenue derivative responds to
//! competition.
//!
//! With `n` bidders and reserve `r`, expected revenue is
//!
//! ```text
//! h(r) = n r F(r)^{n-1} (1 - F(r)) + n(n-1) ∫_r^∞ x F(x)^{n-2} f(x) (1 - F(x)) dx
//! ```
//!
//! (reserve-price term plus runner-up term) and its derivative is
//! `h'(r) = n F(r)^{n-1} [1 - F(r) - r f(r)]`.
//!
//! A bid equal to the reserve wins and pays the reserve.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::analytics::expected_seller_revenue;
use crate::distributions::{Family, ValuationDistribution};
use crate::error::{Error, Result};
use crate::format::csv_num;
use crate::quadrature::{integrate, integrate_to_infinity, QuadratureOptions, QuadratureResult};
use crate::simulate::{estimate_auction, Estimator};

/// CSV header of a reserve scan.
pub const SCAN_HEADER: &str = "r,revenue,surplus,derivative,sale_probability";

/// Pareto shapes at or below this get the larger quadrature budget.
const SLOW_TAIL_SHAPE: f64 = 1.1;

fn check_reserve(dist: &ValuationDistribution, r: f64) -> Result<()> {
    if !r.is_finite() || r < dist.support_infimum() {
        return Err(Error::Domain(format!(
            "reserve r={r} must be finite and at least the support infimum {} of {dist}",
            dist.support_infimum()
        )));
    }
    Ok(())
}

fn check_bidders(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one bidder".into()));
    }
    Ok(())
}

fn options_for(dist: &ValuationDistribution) -> QuadratureOptions {
    match dist.pareto_shape() {
        Some(v) if v <= SLOW_TAIL_SHAPE => QuadratureOptions::heavy_tail(),
        _ => QuadratureOptions::default(),
    }
}

/// `∫_r^sup g(x) dx` with the tail substitution when the support is unbounded.
fn integrate_upper<G: Fn(f64) -> f64>(dist: &ValuationDistribution, r: f64, g: G) -> Result<QuadratureResult> {
    let opts = options_for(dist);
    match dist.family() {
        Family::Uniform { hi, .. } => integrate(g, r, hi, opts),
        Family::Exponential { rate } => integrate_to_infinity(g, r, 1.0 / rate, opts),
        Family::ParetoI { .. } => integrate_to_infinity(g, r, r, opts),
    }
}

/// Root of the virtual value, the revenue-optimal reserve for a regular
/// distribution. For Pareto the virtual value is positive on the whole
/// support, so the optimum is the infimum `a` (no binding reserve).
pub fn myerson_reserve(dist: &ValuationDistribution) -> Result<f64> {
    if !dist.is_regular() {
        return Err(Error::NotRegular(format!("{dist} has a non-increasing virtual value")));
    }
    Ok(match dist.family() {
        Family::Exponential { rate } => 1.0 / rate,
        Family::Uniform { lo, hi } => (0.5 * hi).max(lo),
        Family::ParetoI { scale, .. } => scale,
    })
}

/// `n r F(r)^{n-1} (1 - F(r))`: revenue collected at exactly the reserve.
fn reserve_term(dist: &ValuationDistribution, n: u64, r: f64) -> f64 {
    n as f64 * r * dist.cdf(r).powi(n as i32 - 1) * dist.survival(r)
}

/// `h(r)` evaluated by quadrature (closed-form reserve term plus adaptive
/// quadrature of the runner-up term).
pub fn revenue_with_reserve_quadrature(dist: &ValuationDistribution, n: u64, r: f64) -> Result<QuadratureResult> {
    check_bidders(n)?;
    check_reserve(dist, r)?;
    let first = reserve_term(dist, n, r);
    if n == 1 {
        return Ok(QuadratureResult { value: first, abs_error: 0.0, subdivisions: 0 });
    }
    let pairs = (n * (n - 1)) as f64;
    let k = n as i32 - 2;
    let second = integrate_upper(dist, r, |x| pairs * x * dist.cdf(x).powi(k) * dist.pdf(x) * dist.survival(x))?;
    Ok(QuadratureResult { value: first + second.value, ..second })
}

/// Expected seller revenue `h(r)` with `n` bidders and reserve `r`.
///
/// Closed forms where they exist: the equal-revenue Pareto (`v = 1`) gives
/// `a·n` for every `r >= a`, and a single bidder gives `r (1 - F(r))`.
pub fn revenue_with_reserve(dist: &ValuationDistribution, n: u64, r: f64) -> Result<f64> {
    check_bidders(n)?;
    check_reserve(dist, r)?;
    if let Family::ParetoI { scale, shape } = dist.family() {
        if shape == 1.0 {
            return Ok(scale * n as f64);
        }
    }
    if n == 1 {
        return Ok(reserve_term(dist, 1, r));
    }
    Ok(revenue_with_reserve_quadrature(dist, n, r)?.value)
}

/// Expected buyer surplus for exponential valuations at the Myerson reserve
/// `1/λ`: `(1/λ) [1 - (1 - e^{-1})^n]`.
pub fn surplus_with_reserve_exponential(rate: f64, n: u64) -> Result<f64> {
    check_bidders(n)?;
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidParameter(format!("exponential rate must be > 0, got {rate}")));
    }
    let miss = -(-1.0f64).exp_m1();
    Ok((1.0 - miss.powi(n as i32)) / rate)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum SurplusMethod {
    Quadrature,
    MonteCarlo { replications: u64, seed: u64 },
}

/// Expected buyer surplus with `n` bidders and reserve `r`:
/// `n F(r)^{n-1} E[(X-r)⁺] + n(n-1) ∫_r^∞ F(s)^{n-2} f(s) E[(X-s)⁺] ds`
/// (top bid over the reserve when it binds, top-two gap otherwise).
pub fn surplus_with_reserve(dist: &ValuationDistribution, n: u64, r: f64, method: SurplusMethod) -> Result<f64> {
    check_bidders(n)?;
    check_reserve(dist, r)?;
    if !dist.has_finite_mean() {
        return Err(Error::InfiniteMean(format!("{dist}: expected buyer surplus is infinite")));
    }
    match method {
        SurplusMethod::Quadrature => {
            let nf = n as f64;
            let first = nf * dist.cdf(r).powi(n as i32 - 1) * dist.tail_expectation(r)?;
            if n == 1 {
                return Ok(first);
            }
            let pairs = nf * (nf - 1.0);
            let k = n as i32 - 2;
            let second = integrate_upper(dist, r, |s| {
                let overshoot = dist.tail_expectation(s).unwrap_or(0.0);
                pairs * dist.cdf(s).powi(k) * dist.pdf(s) * overshoot
            })?;
            Ok(first + second.value)
        }
        SurplusMethod::MonteCarlo { replications, seed } => {
            let est = estimate_auction(dist, n, Some(r), replications, seed, Estimator::auto_for(dist))?;
            Ok(est.buyer_surplus.mean)
        }
    }
}

/// `h'(r) = n F(r)^{n-1} [1 - F(r) - r f(r)]`.
pub fn revenue_derivative(dist: &ValuationDistribution, n: u64, r: f64) -> Result<f64> {
    check_bidders(n)?;
    check_reserve(dist, r)?;
    if r > dist.support_supremum() {
        return Err(Error::Domain(format!("reserve r={r} lies above the support of {dist}")));
    }
    let lead = n as f64 * dist.cdf(r).powi(n as i32 - 1);
    Ok(match dist.family() {
        // (1 - F)(1 - v): same quantity, without cancelling 1 - F against r f
        Family::ParetoI { shape, .. } if r > dist.support_infimum() => lead * dist.survival(r) * (1.0 - shape),
        _ => lead * (dist.survival(r) - r * dist.pdf(r)),
    })
}

/// Ratio of `h'(r)` with `n+1` bidders to `h'(r)` with `n`: `((n+1)/n) F(r)`.
pub fn derivative_ratio(dist: &ValuationDistribution, n: u64, r: f64) -> Result<f64> {
    check_bidders(n)?;
    check_reserve(dist, r)?;
    Ok((n + 1) as f64 / n as f64 * dist.cdf(r))
}

/// Where the derivative ratio crosses one for Pareto valuations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioThreshold {
    pub n: u64,
    /// `a (n+1)^{1/v}`: the ratio exceeds one exactly for reserves above this.
    pub reserve: f64,
    /// `(n+1)^{1/v} / a`, a commonly quoted form with the scale inverted;
    /// it agrees with `reserve` only when `a = 1`.
    pub printed_reserve: f64,
    pub note: String,
}

/// Solve `((n+1)/n) F(r) = 1` for Pareto valuations.
///
/// Algebra gives `r = a (n+1)^{1/v}`, with the ratio above one for larger `r`
/// (equivalently `n < (r/a)^v - 1`).
pub fn pareto_ratio_threshold(dist: &ValuationDistribution, n: u64) -> Result<RatioThreshold> {
    check_bidders(n)?;
    let Family::ParetoI { scale, shape } = dist.family() else {
        return Err(Error::InvalidParameter(format!("ratio threshold is defined for Pareto valuations, got {dist}")));
    };
    let root = ((n + 1) as f64).powf(1.0 / shape);
    Ok(RatioThreshold {
        n,
        reserve: scale * root,
        printed_reserve: root / scale,
        note: "ratio ((n+1)/n)F(r) >= 1 holds for r >= a(n+1)^(1/v), i.e. n <= (r/a)^v - 1; \
               the form r <= (n+1)^(1/v)/a, n >= (r/a)^v - 1 has the inequality reversed and \
               the scale inverted"
            .to_string(),
    })
}

/// `(r/a)^v - 1`: bidder count at which the derivative ratio is exactly one.
pub fn pareto_ratio_crossover_bidders(dist: &ValuationDistribution, r: f64) -> Result<f64> {
    let Family::ParetoI { scale, shape } = dist.family() else {
        return Err(Error::InvalidParameter(format!("crossover is defined for Pareto valuations, got {dist}")));
    };
    check_reserve(dist, r)?;
    Ok((r / scale).powf(shape) - 1.0)
}

/// Revenue lost by imposing reserve `r` instead of none: `h(inf) - h(r)`.
pub fn reserve_loss(dist: &ValuationDistribution, n: u64, r: f64) -> Result<f64> {
    let base = revenue_with_reserve(dist, n, dist.support_infimum())?;
    Ok(base - revenue_with_reserve(dist, n, r)?)
}

/// [`reserve_loss`] for each bidder count in `bidders`.
pub fn reserve_loss_curve(
    dist: &ValuationDistribution,
    r: f64,
    bidders: impl IntoIterator<Item = u64>,
) -> Result<Vec<(u64, f64)>> {
    bidders.into_iter().map(|n| Ok((n, reserve_loss(dist, n, r)?))).collect()
}

/// Everything the reserve module knows about one `(n, r)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReserveAnalysis {
    pub dist: ValuationDistribution,
    pub n: u64,
    pub r: f64,
    pub expected_revenue: f64,
    /// `+∞` for the equal-revenue Pareto.
    pub expected_surplus: f64,
    pub revenue_derivative: f64,
    pub sale_probability: f64,
}

pub fn analyze(dist: &ValuationDistribution, n: u64, r: f64) -> Result<ReserveAnalysis> {
    let expected_surplus = match surplus_with_reserve(dist, n, r, SurplusMethod::Quadrature) {
        Err(Error::InfiniteMean(_)) => f64::INFINITY,
        other => other?,
    };
    Ok(ReserveAnalysis {
        dist: *dist,
        n,
        r,
        expected_revenue: revenue_with_reserve(dist, n, r)?,
        expected_surplus,
        revenue_derivative: revenue_derivative(dist, n, r.min(dist.support_supremum()))?,
        sale_probability: 1.0 - dist.cdf(r).powi(n as i32),
    })
}

/// [`analyze`] over a grid of reserves.
pub fn reserve_scan(dist: &ValuationDistribution, n: u64, reserves: &[f64]) -> Result<Vec<ReserveAnalysis>> {
    reserves.iter().map(|&r| analyze(dist, n, r)).collect()
}

pub fn write_scan_csv<W: Write>(rows: &[ReserveAnalysis], mut w: W) -> io::Result<()> {
    writeln!(w, "{SCAN_HEADER}")?;
    for a in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            csv_num(a.r),
            csv_num(a.expected_revenue),
            csv_num(a.expected_surplus),
            csv_num(a.revenue_derivative),
            csv_num(a.sale_probability)
        )?;
    }
    Ok(())
}

/// Seller revenue gained by moving an exponential auction from no reserve to
/// the Myerson reserve `1/λ`, next to the value `(1/λ)(1 - e^{-1})^n` one
/// would get by assuming revenue absorbs exactly the surplus given up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReserveGainProbe {
    pub n: u64,
    pub measured_gain: f64,
    pub surplus_given_up: f64,
    /// Expected top valuation lost when no bid clears the reserve.
    pub unsold_value: f64,
}

/// Measures [`ReserveGainProbe`]. `surplus_given_up` equals `(1/λ)(1-e^{-1})^n`;
/// `measured_gain` is smaller because the top bid is forfeited whenever it
/// falls below the reserve: `gain = surplus_given_up - unsold_value`.
pub fn exponential_reserve_gain(rate: f64, n: u64) -> Result<ReserveGainProbe> {
    let dist = ValuationDistribution::exponential(rate)?;
    let r = 1.0 / rate;
    let without = if n >= 2 { expected_seller_revenue(&dist, n)? } else { 0.0 };
    let measured_gain = revenue_with_reserve(&dist, n, r)? - without;
    let surplus_given_up = 1.0 / rate - surplus_with_reserve_exponential(rate, n)?;
    // E[max; max < r] = ∫_0^r x d(F(x)^n)
    let nf = n as f64;
    let unsold_value = integrate(
        |x| x * nf * dist.cdf(x).powi(n as i32 - 1) * dist.pdf(x),
        0.0,
        r,
        QuadratureOptions::default(),
    )?
    .value;
    Ok(ReserveGainProbe { n, measured_gain, surplus_given_up, unsold_value })
}
