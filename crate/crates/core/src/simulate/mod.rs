//! Seeded Monte Carlo engine for second-price auctions.
//!
//! Replicate `j` always draws from stream `(seed, j)`. Replicates are grouped
//! into fixed chunks that never straddle an estimator block; chunks run on the
//! rayon pool and their moments are merged in chunk order, so results are
//! bit-identical for any worker count.

mod auction;
mod estimator;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use auction::{run_auction, AuctionOutcome};
pub use estimator::{
    Estimate, Estimator, DEFAULT_BLOCKS, HEAVY_TAIL_SHAPE, MIN_REPLICATIONS, SAMPLE_MEAN_MIN_SHAPE,
};

use crate::distributions::ValuationDistribution;
use crate::error::{Error, Result};
use crate::rng::ReplicateStreams;
use auction::top_two;
use estimator::{finish, Moments};

const CHUNK: u64 = 4096;

/// Run `replications` replicates of `body`, which fills one value per output.
/// Returns the estimate for each output.
fn run_replicates<F>(
    replications: u64,
    seed: u64,
    estimator: Estimator,
    outputs: usize,
    body: F,
) -> Vec<Estimate>
where
    F: Fn(&mut ChaCha8Rng, &mut Vec<f64>, &mut [f64]) + Sync,
{
    let streams = ReplicateStreams::new(seed);
    let blocks = estimator.block_count() as u64;
    let mut ranges = Vec::new();
    for b in 0..blocks {
        let start = replications * b / blocks;
        let end = replications * (b + 1) / blocks;
        let mut s = start;
        while s < end {
            let e = (s + CHUNK).min(end);
            ranges.push((b as usize, s, e));
            s = e;
        }
    }

    let partials: Vec<(usize, Vec<Moments>)> = ranges
        .par_iter()
        .map(|&(block, start, end)| {
            let mut moments = vec![Moments::default(); outputs];
            let mut scratch = Vec::new();
            let mut out = vec![0.0; outputs];
            for j in start..end {
                let mut rng = streams.stream(j);
                body(&mut rng, &mut scratch, &mut out);
                for (m, &x) in moments.iter_mut().zip(&out) {
                    m.push(x);
                }
            }
            (block, moments)
        })
        .collect();

    let mut per_block = vec![vec![Moments::default(); blocks as usize]; outputs];
    for (block, moments) in &partials {
        for (k, m) in moments.iter().enumerate() {
            per_block[k][*block].merge(m);
        }
    }
    per_block.iter().map(|b| finish(b, estimator, seed)).collect()
}

fn fill_draws(dist: &ValuationDistribution, count: u64, rng: &mut ChaCha8Rng, buf: &mut Vec<f64>) {
    buf.clear();
    buf.extend((0..count).map(|_| dist.sample(rng)));
}

fn require_finite_mean(dist: &ValuationDistribution) -> Result<()> {
    if dist.has_finite_mean() {
        Ok(())
    } else {
        Err(Error::InfiniteMean(format!("{dist}: expected buyer surplus is infinite")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuctionEstimates {
    pub buyer_surplus: Estimate,
    pub seller_revenue: Estimate,
    pub sold_rate: Estimate,
}

/// Estimate expected buyer surplus, seller revenue and sale probability for
/// `bidders` truthful bidders with optional reserve.
pub fn estimate_auction(
    dist: &ValuationDistribution,
    bidders: u64,
    reserve: Option<f64>,
    replications: u64,
    seed: u64,
    estimator: Estimator,
) -> Result<AuctionEstimates> {
    if bidders == 0 {
        return Err(Error::InvalidParameter("an auction needs at least one bidder".into()));
    }
    if let Some(r) = reserve {
        if !r.is_finite() {
            return Err(Error::InvalidParameter(format!("reserve must be finite, got {r}")));
        }
    }
    estimator.validate(dist, replications)?;
    let est = run_replicates(replications, seed, estimator, 3, |rng, buf, out| {
        fill_draws(dist, bidders, rng, buf);
        let o = run_auction(buf, reserve, rng).expect("draws are finite and non-empty");
        out[0] = o.surplus;
        out[1] = o.price;
        out[2] = if o.sold { 1.0 } else { 0.0 };
    });
    Ok(AuctionEstimates { buyer_surplus: est[0], seller_revenue: est[1], sold_rate: est[2] })
}

/// Paired estimate of `E(p_{n+1} - p_n)`: each replicate draws `n+1`
/// valuations, takes the buyer surplus with everyone and again with bidder
/// `n+1` removed. Uses [`Estimator::auto_for`].
pub fn estimate_surplus_delta(dist: &ValuationDistribution, n: u64, replications: u64, seed: u64) -> Result<Estimate> {
    estimate_surplus_delta_with(dist, n, replications, seed, Estimator::auto_for(dist))
}

pub fn estimate_surplus_delta_with(
    dist: &ValuationDistribution,
    n: u64,
    replications: u64,
    seed: u64,
    estimator: Estimator,
) -> Result<Estimate> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("surplus delta needs n >= 2, got {n}")));
    }
    require_finite_mean(dist)?;
    estimator.validate(dist, replications)?;
    let n_us = n as usize;
    let est = run_replicates(replications, seed, estimator, 1, |rng, buf, out| {
        fill_draws(dist, n + 1, rng, buf);
        let (a1, a2) = top_two(buf);
        let (b1, b2) = top_two(&buf[..n_us]);
        out[0] = (a1 - a2) - (b1 - b2);
    });
    Ok(est[0])
}

/// Paired estimate of `s_{n+1} - s_n`, the seller's gain from bidder `n+1`.
pub fn estimate_revenue_delta(dist: &ValuationDistribution, n: u64, replications: u64, seed: u64) -> Result<Estimate> {
    estimate_revenue_delta_with(dist, n, replications, seed, Estimator::auto_for(dist))
}

pub fn estimate_revenue_delta_with(
    dist: &ValuationDistribution,
    n: u64,
    replications: u64,
    seed: u64,
    estimator: Estimator,
) -> Result<Estimate> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("revenue delta needs n >= 2, got {n}")));
    }
    estimator.validate(dist, replications)?;
    let n_us = n as usize;
    let est = run_replicates(replications, seed, estimator, 1, |rng, buf, out| {
        fill_draws(dist, n + 1, rng, buf);
        out[0] = top_two(buf).1 - top_two(&buf[..n_us]).1;
    });
    Ok(est[0])
}

/// Estimates of `E X_(i)` for every rank `i = 1..=m` from the same replicates.
pub fn estimate_order_stats(
    dist: &ValuationDistribution,
    m: u64,
    replications: u64,
    seed: u64,
    estimator: Estimator,
) -> Result<Vec<Estimate>> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one draw".into()));
    }
    require_finite_mean(dist)?;
    estimator.validate(dist, replications)?;
    Ok(run_replicates(replications, seed, estimator, m as usize, |rng, buf, out| {
        fill_draws(dist, m, rng, buf);
        buf.sort_by(f64::total_cmp);
        out.copy_from_slice(buf);
    }))
}

/// Estimate of `E X_(i)` for `m` draws (rank 1 = smallest).
pub fn estimate_order_stat(
    dist: &ValuationDistribution,
    m: u64,
    i: u64,
    replications: u64,
    seed: u64,
) -> Result<Estimate> {
    if i == 0 || i > m {
        return Err(Error::InvalidParameter(format!("rank must satisfy 1 <= i <= m, got i={i}, m={m}")));
    }
    if let Some(v) = dist.pareto_shape() {
        if (m + 1 - i) as f64 - 1.0 / v <= 0.0 {
            return Err(Error::InfiniteMean(format!("E X_({i}) of {m} draws from {dist} diverges")));
        }
    }
    let estimator = Estimator::auto_for(dist);
    estimator.validate(dist, replications)?;
    let est = run_replicates(replications, seed, estimator, 1, |rng, buf, out| {
        fill_draws(dist, m, rng, buf);
        buf.sort_by(f64::total_cmp);
        out[0] = buf[(i - 1) as usize];
    });
    Ok(est[0])
}
