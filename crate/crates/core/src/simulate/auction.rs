use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Result of one sealed-bid second-price auction with truthful bids.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    pub winner: Option<usize>,
    pub price: f64,
    pub surplus: f64,
    pub sold: bool,
}

impl AuctionOutcome {
    pub const NO_SALE: AuctionOutcome = AuctionOutcome { winner: None, price: 0.0, surplus: 0.0, sold: false };
}

/// Run a second-price auction over `values`.
///
/// The highest value wins, ties broken uniformly at random with `rng`. The
/// winner pays the runner-up value, raised to `reserve` when the reserve
/// binds; a top value below the reserve means no sale. A top value equal to
/// the reserve wins and pays the reserve. A lone bidder with no reserve pays 0.
pub fn run_auction<R: Rng + ?Sized>(values: &[f64], reserve: Option<f64>, rng: &mut R) -> Result<AuctionOutcome> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("an auction needs at least one bid".into()));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("bids must be finite, got {bad}")));
    }
    if let Some(r) = reserve {
        if !r.is_finite() {
            return Err(Error::InvalidParameter(format!("reserve must be finite, got {r}")));
        }
    }

    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if let Some(r) = reserve {
        if top < r {
            return Ok(AuctionOutcome::NO_SALE);
        }
    }

    let tied = values.iter().filter(|&&v| v == top).count();
    let winner = if tied == 1 {
        values.iter().position(|&v| v == top).expect("maximum is present")
    } else {
        let pick = rng.gen_range(0..tied);
        values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == top)
            .nth(pick)
            .map(|(i, _)| i)
            .expect("pick < tied")
    };

    let runner_up = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != winner)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let price = match (runner_up.is_finite(), reserve) {
        (true, Some(r)) => runner_up.max(r),
        (true, None) => runner_up,
        (false, Some(r)) => r,
        (false, None) => 0.0,
    };
    Ok(AuctionOutcome { winner: Some(winner), price, surplus: top - price, sold: true })
}

/// Top and runner-up of `values` (runner-up is `-∞` for a single value).
pub(crate) fn top_two(values: &[f64]) -> (f64, f64) {
    let mut first = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for &v in values {
        if v > first {
            second = first;
            first = v;
        } else if v > second {
            second = v;
        }
    }
    (first, second)
}
