use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distributions::ValuationDistribution;
use crate::error::{Error, Result};

pub const DEFAULT_BLOCKS: usize = 32;
pub const MIN_REPLICATIONS: u64 = 100;

/// Below this Pareto shape the plain sample mean is refused outright.
pub const SAMPLE_MEAN_MIN_SHAPE: f64 = 1.2;
/// At or below this Pareto shape outcome variances may be infinite and
/// median-of-means becomes the default.
pub const HEAVY_TAIL_SHAPE: f64 = 2.0;

/// How replicate outcomes are reduced to a point estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Estimator {
    SampleMean,
    /// Split replicates into `blocks` contiguous blocks, average each, take the median.
    MedianOfMeans { blocks: usize },
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimator::SampleMean => write!(f, "sample-mean"),
            Estimator::MedianOfMeans { blocks } => write!(f, "median-of-means({blocks})"),
        }
    }
}

impl Estimator {
    /// Median-of-means for Pareto with `v <= 2`, sample mean otherwise.
    pub fn auto_for(dist: &ValuationDistribution) -> Self {
        match dist.pareto_shape() {
            Some(v) if v <= HEAVY_TAIL_SHAPE => Estimator::MedianOfMeans { blocks: DEFAULT_BLOCKS },
            _ => Estimator::SampleMean,
        }
    }

    /// Reject combinations that cannot yield a meaningful interval.
    pub fn validate(&self, dist: &ValuationDistribution, replications: u64) -> Result<()> {
        if replications < MIN_REPLICATIONS {
            return Err(Error::InvalidParameter(format!(
                "at least {MIN_REPLICATIONS} replications are required, got {replications}"
            )));
        }
        match *self {
            Estimator::SampleMean => {
                if let Some(v) = dist.pareto_shape() {
                    if v <= SAMPLE_MEAN_MIN_SHAPE {
                        return Err(Error::EstimatorRefused(format!(
                            "sample-mean intervals are invalid for {dist} (infinite outcome variance); \
                             use median-of-means (--estimator mom)"
                        )));
                    }
                    if v <= HEAVY_TAIL_SHAPE {
                        log::warn!("sample-mean standard errors for {dist} are unreliable; median-of-means is recommended");
                    }
                }
            }
            Estimator::MedianOfMeans { blocks } => {
                if blocks < 2 || blocks as u64 > replications / 2 {
                    return Err(Error::InvalidParameter(format!(
                        "median-of-means needs 2 <= blocks <= replications/2, got {blocks} blocks for {replications} replications"
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn block_count(&self) -> usize {
        match *self {
            Estimator::SampleMean => 1,
            Estimator::MedianOfMeans { blocks } => blocks,
        }
    }
}

/// Monte Carlo point estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub replications: u64,
    pub seed: u64,
    pub estimator: Estimator,
}

impl Estimate {
    /// `|mean - target| <= k · std_error`.
    pub fn brackets(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }

    /// Distance from `target` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.std_error
    }
}

/// Running count/mean/sum of squared deviations (Welford), mergeable.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * (self.count as f64) * (other.count as f64) / n;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

fn median(sorted: &[f64]) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    }
}

/// Reduce per-block moments of one outcome to an [`Estimate`].
///
/// Sample mean: `s/√R`. Median-of-means: the median of block means, with
/// standard error `√(π/2) · sd(block means) / √k` (the large-sample error of a
/// median of `k` normal block means). Both are approximate under heavy tails.
pub(crate) fn finish(blocks: &[Moments], estimator: Estimator, seed: u64) -> Estimate {
    let mut total = Moments::default();
    for b in blocks {
        total.merge(b);
    }
    let replications = total.count;
    match estimator {
        Estimator::SampleMean => Estimate {
            mean: total.mean,
            std_error: (total.variance() / replications as f64).sqrt(),
            replications,
            seed,
            estimator,
        },
        Estimator::MedianOfMeans { .. } => {
            let mut means: Vec<f64> = blocks.iter().map(|b| b.mean).collect();
            means.sort_by(f64::total_cmp);
            let mut spread = Moments::default();
            for &m in &means {
                spread.push(m);
            }
            let k = means.len() as f64;
            Estimate {
                mean: median(&means),
                std_error: (std::f64::consts::FRAC_PI_2).sqrt() * spread.variance().sqrt() / k.sqrt(),
                replications,
                seed,
                estimator,
            }
        }
    }
}
