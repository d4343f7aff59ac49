//! Who may bid where: expected surplus per bidder and revenue per seller
//! across a family of independent second-price auctions, and comparisons of
//! two participation arrangements.
//!
//! Auction `j` with `b_j` participants pays each participant `E p_j(b_j)/b_j`
//! by symmetry and earns its seller `E r_j(b_j)`. Conventions for thin
//! auctions: `b_j = 0` yields nothing; `b_j = 1` yields revenue 0 and gives
//! the lone bidder the full expected valuation (the price is the support
//! infimum, taken as 0).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytics::{expected_buyer_surplus, expected_seller_revenue, parse_table_csv, TableRow};
use crate::distributions::ValuationDistribution;
use crate::error::{Error, Result};
use crate::simulate::{estimate_auction, Estimator};

/// Relative tolerance for deciding that a party is strictly better or worse off.
pub const STRICT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SellerMode {
    /// One seller owns every auction and cares about total revenue.
    SingleSeller,
    /// Each auction has its own seller.
    PerAuctionSeller,
}

/// Source of `E p_j(b)` and `E r_j(b)` for one auction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuctionModel {
    ClosedForm(ValuationDistribution),
    MonteCarlo { dist: ValuationDistribution, replications: u64, seed: u64 },
    /// Rows of a surplus/revenue table keyed by bidder count.
    Table(Vec<TableRow>),
}

impl AuctionModel {
    fn table_row(rows: &[TableRow], b: u64) -> Result<&TableRow> {
        rows.iter()
            .find(|r| r.m == b)
            .ok_or_else(|| Error::InvalidParameter(format!("surplus table has no row for {b} bidders")))
    }

    fn lone_bidder_surplus(&self) -> Result<f64> {
        match self {
            AuctionModel::ClosedForm(dist) | AuctionModel::MonteCarlo { dist, .. } => dist.mean(),
            AuctionModel::Table(rows) => Ok(Self::table_row(rows, 1)?.buyer_surplus),
        }
    }

    /// `E p(b)`, total buyer surplus with `b` participants.
    pub fn surplus(&self, b: u64) -> Result<f64> {
        match (b, self) {
            (0, _) => Ok(0.0),
            (1, _) => self.lone_bidder_surplus(),
            (_, AuctionModel::ClosedForm(dist)) => expected_buyer_surplus(dist, b),
            (_, AuctionModel::MonteCarlo { dist, replications, seed }) => {
                if !dist.has_finite_mean() {
                    return Err(Error::InfiniteMean(format!("{dist}: expected buyer surplus is infinite")));
                }
                let e = estimate_auction(dist, b, None, *replications, *seed, Estimator::auto_for(dist))?;
                Ok(e.buyer_surplus.mean)
            }
            (_, AuctionModel::Table(rows)) => Ok(Self::table_row(rows, b)?.buyer_surplus),
        }
    }

    /// `E r(b)`, seller revenue with `b` participants.
    pub fn revenue(&self, b: u64) -> Result<f64> {
        match (b, self) {
            (0 | 1, _) => Ok(0.0),
            (_, AuctionModel::ClosedForm(dist)) => expected_seller_revenue(dist, b),
            (_, AuctionModel::MonteCarlo { dist, replications, seed }) => {
                let e = estimate_auction(dist, b, None, *replications, *seed, Estimator::auto_for(dist))?;
                Ok(e.seller_revenue.mean)
            }
            (_, AuctionModel::Table(rows)) => Ok(Self::table_row(rows, b)?.seller_revenue),
        }
    }
}

/// `I(i, j) = true` iff bidder `i` may bid in auction `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticipationMatrix {
    membership: Vec<Vec<bool>>,
    auctions: Vec<AuctionModel>,
    seller_mode: SellerMode,
}

impl ParticipationMatrix {
    /// `membership` has one row per bidder and one column per entry of `auctions`.
    pub fn new(membership: Vec<Vec<bool>>, auctions: Vec<AuctionModel>, seller_mode: SellerMode) -> Result<Self> {
        if let Some((i, row)) = membership.iter().enumerate().find(|(_, r)| r.len() != auctions.len()) {
            return Err(Error::Mismatch(format!(
                "bidder {i} has {} entries but there are {} auctions",
                row.len(),
                auctions.len()
            )));
        }
        Ok(Self { membership, auctions, seller_mode })
    }

    /// Everyone bids everywhere.
    pub fn all_in(bidders: usize, auctions: Vec<AuctionModel>, seller_mode: SellerMode) -> Self {
        let membership = vec![vec![true; auctions.len()]; bidders];
        Self { membership, auctions, seller_mode }
    }

    pub fn bidders(&self) -> usize {
        self.membership.len()
    }

    pub fn auctions(&self) -> &[AuctionModel] {
        &self.auctions
    }

    pub fn seller_mode(&self) -> SellerMode {
        self.seller_mode
    }

    pub fn membership(&self) -> &[Vec<bool>] {
        &self.membership
    }

    pub fn is_member(&self, bidder: usize, auction: usize) -> bool {
        self.membership[bidder][auction]
    }

    /// `b_j` for every auction.
    pub fn participants(&self) -> Vec<u64> {
        (0..self.auctions.len())
            .map(|j| self.membership.iter().filter(|row| row[j]).count() as u64)
            .collect()
    }

    /// Rows of 0/1 separated by commas, one bidder per line, no header.
    pub fn membership_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.membership {
            let cells: Vec<&str> = row.iter().map(|&x| if x { "1" } else { "0" }).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Parse a membership CSV. Blank lines and lines starting with `#` are ignored.
pub fn parse_membership_csv(text: &str) -> Result<Vec<Vec<bool>>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, line)| {
            line.split(',')
                .map(|cell| match cell.trim() {
                    "1" => Ok(true),
                    "0" => Ok(false),
                    other => Err(Error::Parse(format!("bidder row {i}: expected 0 or 1, found `{other}`"))),
                })
                .collect()
        })
        .collect()
}

/// One auction entry of a sidecar file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AuctionSpec {
    /// `{"table": "path.csv"}`, relative to the sidecar's directory.
    Table { table: PathBuf },
    /// `{"simulate": {"dist": {...}, "replications": .., "seed": ..}}`
    Simulate { simulate: SimulateSpec },
    Distribution(ValuationDistribution),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub dist: ValuationDistribution,
    pub replications: u64,
    pub seed: u64,
}

/// JSON sidecar describing the auctions behind a membership CSV. Either
/// `auctions` lists one entry per column, or `distribution` applies to all.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub seller_mode: SellerMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auctions: Option<Vec<AuctionSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<ValuationDistribution>,
}

impl Sidecar {
    fn resolve(&self, columns: usize, base: &Path) -> Result<Vec<AuctionModel>> {
        match (&self.auctions, &self.distribution) {
            (Some(list), None) => {
                if list.len() != columns {
                    return Err(Error::Mismatch(format!(
                        "sidecar lists {} auctions but the matrix has {columns} columns",
                        list.len()
                    )));
                }
                list.iter()
                    .map(|spec| match spec {
                        AuctionSpec::Distribution(d) => Ok(AuctionModel::ClosedForm(*d)),
                        AuctionSpec::Simulate { simulate: s } => Ok(AuctionModel::MonteCarlo {
                            dist: s.dist,
                            replications: s.replications,
                            seed: s.seed,
                        }),
                        AuctionSpec::Table { table } => {
                            let text = fs::read_to_string(base.join(table))?;
                            Ok(AuctionModel::Table(parse_table_csv(&text)?))
                        }
                    })
                    .collect()
            }
            (None, Some(d)) => Ok(vec![AuctionModel::ClosedForm(*d); columns]),
            _ => Err(Error::Parse("sidecar needs exactly one of `auctions` or `distribution`".into())),
        }
    }
}

/// Load a matrix from its membership CSV and JSON sidecar. The number of
/// auctions comes from the sidecar when the CSV has no rows.
pub fn load_matrix(csv_path: &Path, sidecar_path: &Path) -> Result<ParticipationMatrix> {
    let membership = parse_membership_csv(&fs::read_to_string(csv_path)?)?;
    let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(sidecar_path)?)?;
    let columns = match membership.first() {
        Some(row) => row.len(),
        None => sidecar.auctions.as_ref().map_or(0, Vec::len),
    };
    let base = sidecar_path.parent().unwrap_or_else(|| Path::new("."));
    let auctions = sidecar.resolve(columns, base)?;
    ParticipationMatrix::new(membership, auctions, sidecar.seller_mode)
}

/// `Σ_j I(i,j) E p_j(b_j) / b_j` for every bidder `i`.
pub fn bidder_surplus_vector(pm: &ParticipationMatrix) -> Result<Vec<f64>> {
    let b = pm.participants();
    let share = pm
        .auctions
        .iter()
        .zip(&b)
        .map(|(model, &bj)| if bj == 0 { Ok(0.0) } else { Ok(model.surplus(bj)? / bj as f64) })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pm
        .membership
        .iter()
        .map(|row| row.iter().zip(&share).filter(|(&m, _)| m).map(|(_, s)| s).sum())
        .collect())
}

/// `E r_j(b_j)` for every auction.
pub fn seller_revenue_per_auction(pm: &ParticipationMatrix) -> Result<Vec<f64>> {
    pm.auctions.iter().zip(pm.participants()).map(|(model, bj)| model.revenue(bj)).collect()
}

/// Revenue by seller: one total in single-seller mode, one entry per auction
/// otherwise.
pub fn seller_revenue_total(pm: &ParticipationMatrix) -> Result<Vec<f64>> {
    let per = seller_revenue_per_auction(pm)?;
    Ok(match pm.seller_mode {
        SellerMode::SingleSeller => vec![per.iter().sum()],
        SellerMode::PerAuctionSeller => per,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Bidder(usize),
    /// The single seller.
    Seller,
    /// Seller of one auction in per-auction mode.
    AuctionSeller(usize),
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Bidder(i) => write!(f, "bidder {i}"),
            Party::Seller => f.write_str("seller"),
            Party::AuctionSeller(j) => write!(f, "seller of auction {j}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartyDelta {
    pub party: Party,
    pub old: f64,
    pub new: f64,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Change {
    Better,
    Same,
    Worse,
}

impl PartyDelta {
    pub fn change(&self) -> Change {
        let tol = STRICT_TOLERANCE * self.old.abs().max(self.new.abs());
        if self.delta > tol {
            Change::Better
        } else if self.delta < -tol {
            Change::Worse
        } else {
            Change::Same
        }
    }
}

/// Outcome of comparing two arrangements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImprovementReport {
    /// Nobody worse off and somebody strictly better off.
    pub verdict: bool,
    /// First strictly better party, sellers before bidders.
    pub strict_party: Option<Party>,
    pub strict_parties: Vec<Party>,
    pub worse_parties: Vec<Party>,
    pub deltas: Vec<PartyDelta>,
}

impl ImprovementReport {
    pub fn delta_for(&self, party: Party) -> Option<f64> {
        self.deltas.iter().find(|d| d.party == party).map(|d| d.delta)
    }

    fn from_values(
        old_bidders: &[f64],
        new_bidders: &[f64],
        old_sellers: &[f64],
        new_sellers: &[f64],
        mode: SellerMode,
    ) -> Self {
        let sellers = old_sellers.iter().zip(new_sellers).enumerate().map(|(j, (&o, &n))| {
            let party = match mode {
                SellerMode::SingleSeller => Party::Seller,
                SellerMode::PerAuctionSeller => Party::AuctionSeller(j),
            };
            PartyDelta { party, old: o, new: n, delta: n - o }
        });
        let bidders = old_bidders
            .iter()
            .zip(new_bidders)
            .enumerate()
            .map(|(i, (&o, &n))| PartyDelta { party: Party::Bidder(i), old: o, new: n, delta: n - o });
        let deltas: Vec<PartyDelta> = sellers.chain(bidders).collect();
        let pick = |c: Change| deltas.iter().filter(|d| d.change() == c).map(|d| d.party).collect::<Vec<_>>();
        let strict_parties = pick(Change::Better);
        let worse_parties = pick(Change::Worse);
        ImprovementReport {
            verdict: worse_parties.is_empty() && !strict_parties.is_empty(),
            strict_party: strict_parties.first().copied(),
            strict_parties,
            worse_parties,
            deltas,
        }
    }
}

/// Is `new` a Pareto improvement in expectation over `old`?
///
/// Bidders compare expected surplus, sellers compare revenue (the total in
/// single-seller mode, each auction separately otherwise). Both matrices must
/// share bidders, auctions and seller mode.
pub fn is_pareto_improvement(old: &ParticipationMatrix, new: &ParticipationMatrix) -> Result<ImprovementReport> {
    if old.seller_mode != new.seller_mode {
        return Err(Error::Mismatch(format!(
            "seller modes differ: {:?} vs {:?}",
            old.seller_mode, new.seller_mode
        )));
    }
    if old.bidders() != new.bidders() {
        return Err(Error::Mismatch(format!("{} bidders vs {}", old.bidders(), new.bidders())));
    }
    if old.auctions != new.auctions {
        return Err(Error::Mismatch("the two arrangements must use the same auctions".into()));
    }
    Ok(ImprovementReport::from_values(
        &bidder_surplus_vector(old)?,
        &bidder_surplus_vector(new)?,
        &seller_revenue_total(old)?,
        &seller_revenue_total(new)?,
        old.seller_mode,
    ))
}

/// `m` bidders and `m` auctions of `dist` under one seller. In `old`,
/// auction `j` excludes bidder `j`; in `new` everyone bids everywhere.
pub fn round_robin_exclusion(
    bidders: usize,
    dist: ValuationDistribution,
) -> Result<(ParticipationMatrix, ParticipationMatrix)> {
    if bidders < 3 {
        return Err(Error::InvalidParameter(format!(
            "round-robin exclusion needs at least 3 bidders, got {bidders}"
        )));
    }
    let auctions = vec![AuctionModel::ClosedForm(dist); bidders];
    let membership = (0..bidders).map(|i| (0..bidders).map(|j| i != j).collect()).collect();
    let old = ParticipationMatrix::new(membership, auctions.clone(), SellerMode::SingleSeller)?;
    let new = ParticipationMatrix::all_in(bidders, auctions, SellerMode::SingleSeller);
    Ok((old, new))
}

/// One auction with `n + 1` potential bidders. In the old arrangement one of
/// them, chosen uniformly at random, is turned away, so each bidder expects
/// `E p_n / (n+1)` and the seller `E r_n`; in the new one all participate and
/// each expects `E p_{n+1} / (n+1)`.
pub fn random_exclusion(n: u64, dist: &ValuationDistribution) -> Result<ImprovementReport> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("random exclusion needs n >= 2, got {n}")));
    }
    let k = (n + 1) as usize;
    let denom = (n + 1) as f64;
    let old_each = expected_buyer_surplus(dist, n)? / denom;
    let new_each = expected_buyer_surplus(dist, n + 1)? / denom;
    Ok(ImprovementReport::from_values(
        &vec![old_each; k],
        &vec![new_each; k],
        &[expected_seller_revenue(dist, n)?],
        &[expected_seller_revenue(dist, n + 1)?],
        SellerMode::SingleSeller,
    ))
}
