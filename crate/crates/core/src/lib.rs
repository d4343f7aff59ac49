//! Expected buyer surplus and seller revenue in second-price auctions with
//! i.i.d. valuations: closed forms, order statistics, reserve prices,
//! participation comparisons and a seeded Monte Carlo engine.

pub mod analytics;
pub mod distributions;
pub mod error;
pub mod format;
pub mod orderstats;
pub mod participation;
pub mod quadrature;
pub mod reserve;
pub mod rng;
pub mod simulate;
pub mod special;

pub use distributions::{Family, ValuationDistribution};
pub use error::{Error, Result};
