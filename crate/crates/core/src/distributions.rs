//! Parametric valuation distributions.
//!
//! Every distribution is validated at construction. Draws are inverse-transform
//! only: one uniform variate in, one valuation out, so paired experiments can
//! reuse the same uniforms across arms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Family and parameters of a validated distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// Uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Exponential with rate `rate` (mean `1/rate`).
    Exponential { rate: f64 },
    /// Pareto Type I, cdf `1 - (scale/x)^shape` on `[scale, ∞)`.
    ParetoI { scale: f64, shape: f64 },
}

/// An i.i.d. bidder valuation distribution.
///
/// Serialized as `{"family":"uniform","lo":..,"hi":..}`,
/// `{"family":"exponential","lambda":..}` or `{"family":"pareto1","a":..,"v":..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct ValuationDistribution(Family);

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum RawDistribution {
    Uniform { lo: f64, hi: f64 },
    Exponential { lambda: f64 },
    Pareto1 { a: f64, v: f64 },
}

impl TryFrom<RawDistribution> for ValuationDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        match raw {
            RawDistribution::Uniform { lo, hi } => Self::uniform(lo, hi),
            RawDistribution::Exponential { lambda } => Self::exponential(lambda),
            RawDistribution::Pareto1 { a, v } => Self::pareto(a, v),
        }
    }
}

impl From<ValuationDistribution> for RawDistribution {
    fn from(d: ValuationDistribution) -> Self {
        match d.0 {
            Family::Uniform { lo, hi } => RawDistribution::Uniform { lo, hi },
            Family::Exponential { rate } => RawDistribution::Exponential { lambda: rate },
            Family::ParetoI { scale, shape } => RawDistribution::Pareto1 { a: scale, v: shape },
        }
    }
}

impl std::fmt::Display for ValuationDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Family::Uniform { lo, hi } => write!(f, "Uniform({lo}, {hi})"),
            Family::Exponential { rate } => write!(f, "Exponential(λ={rate})"),
            Family::ParetoI { scale, shape } => write!(f, "ParetoI(a={scale}, v={shape})"),
        }
    }
}

impl ValuationDistribution {
    /// Parse the JSON form. Malformed JSON is a [`Error::Json`]; well-formed
    /// JSON with inadmissible parameters keeps its domain error.
    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let raw: RawDistribution = serde_json::from_value(value)?;
        Self::try_from(raw)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_value(serde_json::from_str(text)?)
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "uniform requires finite lo < hi, got lo={lo}, hi={hi}"
            )));
        }
        Ok(Self(Family::Uniform { lo, hi }))
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponential rate must be finite and > 0, got {rate}"
            )));
        }
        Ok(Self(Family::Exponential { rate }))
    }

    /// Pareto Type I. `shape = 1` (the equal-revenue distribution) is accepted;
    /// operations that need a finite top-order-statistic mean reject it.
    pub fn pareto(scale: f64, shape: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pareto scale a must be finite and > 0, got {scale}"
            )));
        }
        if shape.is_nan() || shape < 1.0 {
            return Err(Error::InfiniteMean(format!(
                "pareto shape v={shape} is below 1, so every valuation has infinite mean"
            )));
        }
        if !shape.is_finite() {
            return Err(Error::InvalidParameter(format!("pareto shape v must be finite, got {shape}")));
        }
        Ok(Self(Family::ParetoI { scale, shape }))
    }

    pub fn family(&self) -> Family {
        self.0
    }

    /// Short family name used in CSV/JSON output.
    pub fn family_name(&self) -> &'static str {
        match self.0 {
            Family::Uniform { .. } => "uniform",
            Family::Exponential { .. } => "exponential",
            Family::ParetoI { .. } => "pareto1",
        }
    }

    pub fn support_infimum(&self) -> f64 {
        match self.0 {
            Family::Uniform { lo, .. } => lo,
            Family::Exponential { .. } => 0.0,
            Family::ParetoI { scale, .. } => scale,
        }
    }

    pub fn support_supremum(&self) -> f64 {
        match self.0 {
            Family::Uniform { hi, .. } => hi,
            _ => f64::INFINITY,
        }
    }

    /// A length scale of the distribution (spread, not location); used to
    /// size quadrature substitutions and finite-difference steps.
    pub fn scale(&self) -> f64 {
        match self.0 {
            Family::Uniform { lo, hi } => hi - lo,
            Family::Exponential { rate } => 1.0 / rate,
            Family::ParetoI { scale, .. } => scale,
        }
    }

    /// True when `E X` is finite. Only the equal-revenue Pareto (`v = 1`) fails.
    pub fn has_finite_mean(&self) -> bool {
        !matches!(self.0, Family::ParetoI { shape, .. } if shape <= 1.0)
    }

    /// Shape `v` for Pareto, `None` otherwise.
    pub fn pareto_shape(&self) -> Option<f64> {
        match self.0 {
            Family::ParetoI { shape, .. } => Some(shape),
            _ => None,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.0 {
            Family::Uniform { lo, hi } => {
                if x <= lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            Family::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Family::ParetoI { scale, shape } => {
                if x <= scale {
                    0.0
                } else {
                    1.0 - (scale / x).powf(shape)
                }
            }
        }
    }

    /// `1 - F(x)`, computed without cancellation in the right tail.
    pub fn survival(&self, x: f64) -> f64 {
        match self.0 {
            Family::Uniform { .. } => 1.0 - self.cdf(x),
            Family::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Family::ParetoI { scale, shape } => {
                if x <= scale {
                    1.0
                } else {
                    (scale / x).powf(shape)
                }
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self.0 {
            Family::Uniform { lo, hi } => {
                if x < lo || x > hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
            Family::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Family::ParetoI { scale, shape } => {
                if x < scale {
                    0.0
                } else {
                    shape * (scale / x).powf(shape) / x
                }
            }
        }
    }

    /// Inverse cdf on the open unit interval.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {u}")));
        }
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match self.0 {
            Family::Uniform { lo, hi } => lo + u * (hi - lo),
            Family::Exponential { rate } => -(-u).ln_1p() / rate,
            Family::ParetoI { scale, shape } => scale * (1.0 - u).powf(-1.0 / shape),
        }
    }

    /// One inverse-transform draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile_unchecked(open_unit(rng))
    }

    /// Myerson virtual value `x - (1 - F(x)) / f(x)` on the support interior.
    pub fn virtual_value(&self, x: f64) -> Result<f64> {
        let inside = x > self.support_infimum() && x < self.support_supremum();
        // The closed lower edge is harmless for Exponential/Pareto (f > 0 there).
        let at_open_edge = x == self.support_infimum() && !matches!(self.0, Family::Uniform { .. });
        if !(inside || at_open_edge) {
            return Err(Error::Domain(format!("virtual value requested at x={x} outside the support of {self}")));
        }
        Ok(match self.0 {
            Family::Uniform { hi, .. } => 2.0 * x - hi,
            Family::Exponential { rate } => x - 1.0 / rate,
            Family::ParetoI { shape, .. } => x * (1.0 - 1.0 / shape),
        })
    }

    /// Myerson regularity: strictly increasing virtual value.
    pub fn is_regular(&self) -> bool {
        match self.0 {
            Family::Uniform { .. } | Family::Exponential { .. } => true,
            Family::ParetoI { shape, .. } => shape > 1.0,
        }
    }

    pub fn mean(&self) -> Result<f64> {
        match self.0 {
            Family::Uniform { lo, hi } => Ok(0.5 * (lo + hi)),
            Family::Exponential { rate } => Ok(1.0 / rate),
            Family::ParetoI { scale, shape } => {
                if shape <= 1.0 {
                    Err(Error::InfiniteMean(format!("{self} has infinite mean")))
                } else {
                    Ok(shape * scale / (shape - 1.0))
                }
            }
        }
    }

    /// `E[(X - s)⁺] = ∫_s^∞ (1 - F(t)) dt`, the expected overshoot of a draw above `s`.
    pub fn tail_expectation(&self, s: f64) -> Result<f64> {
        match self.0 {
            Family::Uniform { lo, hi } => {
                let s = s.max(lo);
                if s >= hi {
                    Ok(0.0)
                } else if s == lo {
                    Ok(0.5 * (hi - lo))
                } else {
                    Ok((hi - s) * (hi - s) / (2.0 * (hi - lo)))
                }
            }
            Family::Exponential { rate } => {
                if s <= 0.0 {
                    Ok(1.0 / rate - s)
                } else {
                    Ok((-rate * s).exp() / rate)
                }
            }
            Family::ParetoI { scale, shape } => {
                if shape <= 1.0 {
                    return Err(Error::InfiniteMean(format!("{self} has infinite mean")));
                }
                if s <= scale {
                    Ok(shape * scale / (shape - 1.0) - s)
                } else {
                    Ok(s * (scale / s).powf(shape) / (shape - 1.0))
                }
            }
        }
    }
}

/// Uniform variate on the open interval (0, 1) from the top 53 bits.
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}
