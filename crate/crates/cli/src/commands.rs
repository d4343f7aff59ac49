use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use auctionlab::analytics::{build_table, surplus_delta_closed, TABLE_HEADER};
use auctionlab::format::csv_num;
use auctionlab::participation::{
    bidder_surplus_vector, is_pareto_improvement, load_matrix, round_robin_exclusion, seller_revenue_total,
    ImprovementReport, ParticipationMatrix,
};
use auctionlab::reserve::{myerson_reserve, pareto_ratio_threshold, reserve_scan, write_scan_csv};
use auctionlab::simulate::{
    estimate_auction, estimate_surplus_delta_with, Estimate, Estimator, DEFAULT_BLOCKS,
};
use auctionlab::{Family, ValuationDistribution};
use serde::Serialize;
use serde_json::json;

use crate::config::{EstimatorChoice, Format, RunConfig};

pub const TOOL: &str = "auctionlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const DEFAULT_REPS: u64 = 100_000;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_R_STEPS: usize = 41;

/// Rendered command output plus the resolved configuration.
pub struct Rendered {
    pub config: RunConfig,
    pub text: String,
}

fn dist_of(cfg: &mut RunConfig) -> Result<ValuationDistribution> {
    let raw = RunConfig::require(&cfg.dist, "dist")?;
    let dist = ValuationDistribution::from_json_value(raw)?;
    cfg.dist = Some(serde_json::to_value(dist)?);
    Ok(dist)
}

fn csv_preamble(cfg: &RunConfig, notes: &[String]) -> Result<String> {
    let mut s = String::new();
    writeln!(s, "# tool: {TOOL} {VERSION}")?;
    writeln!(s, "# config: {}", serde_json::to_string(cfg)?)?;
    if let Some(seed) = cfg.seed {
        writeln!(s, "# seed: {seed}")?;
    }
    for n in notes {
        writeln!(s, "# note: {n}")?;
    }
    Ok(s)
}

fn json_document<T: Serialize>(cfg: &RunConfig, result: &T) -> Result<String> {
    let doc = json!({ "tool": TOOL, "version": VERSION, "config": cfg, "result": result });
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

pub fn table(mut cfg: RunConfig) -> Result<Rendered> {
    let dist = dist_of(&mut cfg)?;
    let m_min = *cfg.m_min.get_or_insert(2);
    let m_max = *cfg.m_max.get_or_insert(m_min.max(10));
    if m_min < 2 || m_min > m_max {
        bail!("bidder range must satisfy 2 <= m_min <= m_max, got {m_min}..{m_max}");
    }
    let format = *cfg.format.get_or_insert(Format::Csv);
    let table = build_table(&dist, m_min, m_max)?;
    let text = match format {
        Format::Csv => {
            let mut s = csv_preamble(&cfg, &[])?;
            debug_assert!(table.to_csv_string().starts_with(TABLE_HEADER));
            s.push_str(&table.to_csv_string());
            s
        }
        Format::Json => json_document(&cfg, &table)?,
    };
    Ok(Rendered { config: cfg, text })
}

fn estimator_of(cfg: &mut RunConfig, dist: &ValuationDistribution) -> Estimator {
    let choice = *cfg.estimator.get_or_insert(EstimatorChoice::Auto);
    let est = match choice {
        EstimatorChoice::Mean => Estimator::SampleMean,
        EstimatorChoice::Mom => Estimator::MedianOfMeans { blocks: cfg.blocks.unwrap_or(DEFAULT_BLOCKS) },
        EstimatorChoice::Auto => Estimator::auto_for(dist),
    };
    if let Estimator::MedianOfMeans { blocks } = est {
        cfg.blocks = Some(blocks);
    }
    est
}

#[derive(Serialize)]
struct Labeled {
    quantity: &'static str,
    #[serde(flatten)]
    estimate: Estimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<f64>,
}

pub fn simulate(mut cfg: RunConfig) -> Result<Rendered> {
    let dist = dist_of(&mut cfg)?;
    let bidders = RunConfig::require(&cfg.bidders, "bidders")?;
    let reps = *cfg.reps.get_or_insert(DEFAULT_REPS);
    let seed = *cfg.seed.get_or_insert(DEFAULT_SEED);
    let paired = *cfg.paired.get_or_insert(false);
    let format = *cfg.format.get_or_insert(Format::Json);
    let estimator = estimator_of(&mut cfg, &dist);

    let rows = if paired {
        if cfg.reserve.is_some() {
            bail!("--paired estimates the no-reserve surplus delta; drop --reserve");
        }
        let est = estimate_surplus_delta_with(&dist, bidders, reps, seed, estimator)?;
        vec![Labeled { quantity: "surplus_delta", estimate: est, closed_form: surplus_delta_closed(&dist, bidders).ok() }]
    } else {
        let e = estimate_auction(&dist, bidders, cfg.reserve, reps, seed, estimator)?;
        vec![
            Labeled { quantity: "buyer_surplus", estimate: e.buyer_surplus, closed_form: None },
            Labeled { quantity: "seller_revenue", estimate: e.seller_revenue, closed_form: None },
            Labeled { quantity: "sold_rate", estimate: e.sold_rate, closed_form: None },
        ]
    };

    let text = match format {
        Format::Json => json_document(&cfg, &rows)?,
        Format::Csv => {
            let mut s = csv_preamble(&cfg, &[])?;
            s.push_str("quantity,mean,std_error,replications,seed,estimator,closed_form\n");
            for r in &rows {
                let e = &r.estimate;
                writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.quantity,
                    csv_num(e.mean),
                    csv_num(e.std_error),
                    e.replications,
                    e.seed,
                    e.estimator,
                    r.closed_form.map(csv_num).unwrap_or_default()
                )?;
            }
            s
        }
    };
    Ok(Rendered { config: cfg, text })
}

fn reserve_notes(dist: &ValuationDistribution, n: u64) -> Vec<String> {
    let mut notes = Vec::new();
    if let Ok(r) = myerson_reserve(dist) {
        notes.push(format!("revenue-optimal reserve {}", csv_num(r)));
    }
    if let Ok(t) = pareto_ratio_threshold(dist, n) {
        notes.push(format!(
            "derivative ratio with one more bidder exceeds 1 for r > {} (a(n+1)^(1/v)); \
             the printed form (n+1)^(1/v)/a = {} is not the threshold",
            csv_num(t.reserve),
            csv_num(t.printed_reserve)
        ));
        notes.push(t.note);
    }
    notes
}

pub fn reserve_scan_cmd(mut cfg: RunConfig) -> Result<Rendered> {
    let dist = dist_of(&mut cfg)?;
    let n = RunConfig::require(&cfg.bidders, "bidders")?;
    let r_min = *cfg.r_min.get_or_insert(dist.support_infimum());
    let default_max = match dist.family() {
        Family::Uniform { hi, .. } => hi,
        Family::Exponential { rate } => 5.0 / rate,
        Family::ParetoI { scale, .. } => 10.0 * scale,
    };
    let r_max = *cfg.r_max.get_or_insert(default_max);
    let steps = *cfg.r_steps.get_or_insert(DEFAULT_R_STEPS);
    let format = *cfg.format.get_or_insert(Format::Csv);
    if steps == 0 || r_min.is_nan() || r_max.is_nan() || r_min > r_max {
        bail!("reserve grid must be non-empty: r_min={r_min}, r_max={r_max}, r_steps={steps}");
    }
    let grid: Vec<f64> = if steps == 1 {
        vec![r_min]
    } else {
        (0..steps).map(|k| r_min + (r_max - r_min) * k as f64 / (steps - 1) as f64).collect()
    };
    let rows = reserve_scan(&dist, n, &grid)?;
    let notes = reserve_notes(&dist, n);
    let text = match format {
        Format::Csv => {
            let mut s = csv_preamble(&cfg, &notes)?.into_bytes();
            write_scan_csv(&rows, &mut s)?;
            String::from_utf8(s)?
        }
        Format::Json => json_document(&cfg, &json!({ "rows": rows, "notes": notes }))?,
    };
    Ok(Rendered { config: cfg, text })
}

fn sidecar_for(csv: &Path, explicit: &Option<PathBuf>) -> PathBuf {
    explicit.clone().unwrap_or_else(|| csv.with_extension("json"))
}

#[derive(Serialize)]
struct Side {
    bidder_surplus: Vec<f64>,
    seller_revenue: Vec<f64>,
}

fn side(pm: &ParticipationMatrix) -> Result<Side> {
    Ok(Side { bidder_surplus: bidder_surplus_vector(pm)?, seller_revenue: seller_revenue_total(pm)? })
}

pub fn participation(mut cfg: RunConfig) -> Result<Rendered> {
    let format = *cfg.format.get_or_insert(Format::Json);
    let (old, new) = match cfg.round_robin {
        Some(m) => {
            if cfg.old.is_some() || cfg.new.is_some() {
                bail!("give either --round-robin or --old/--new matrices, not both");
            }
            let dist = dist_of(&mut cfg)?;
            round_robin_exclusion(m, dist)?
        }
        None => {
            let old_csv = RunConfig::require(&cfg.old, "old")?;
            let new_csv = RunConfig::require(&cfg.new, "new")?;
            let old_side = sidecar_for(&old_csv, &cfg.old_sidecar);
            let new_side = sidecar_for(&new_csv, &cfg.new_sidecar);
            let old = load_matrix(&old_csv, &old_side).with_context(|| format!("loading {}", old_csv.display()))?;
            let new = load_matrix(&new_csv, &new_side).with_context(|| format!("loading {}", new_csv.display()))?;
            cfg.old_sidecar = Some(old_side);
            cfg.new_sidecar = Some(new_side);
            (old, new)
        }
    };
    let report: ImprovementReport = is_pareto_improvement(&old, &new)?;
    let text = match format {
        Format::Json => json_document(
            &cfg,
            &json!({ "report": report, "old": side(&old)?, "new": side(&new)? }),
        )?,
        Format::Csv => {
            let mut notes = vec![format!("verdict: {}", report.verdict)];
            if let Some(p) = report.strict_party {
                notes.push(format!("strict party: {p}"));
            }
            let mut s = csv_preamble(&cfg, &notes)?;
            s.push_str("party,old,new,delta,change\n");
            for d in &report.deltas {
                let change = serde_json::to_value(d.change())?;
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    d.party,
                    csv_num(d.old),
                    csv_num(d.new),
                    csv_num(d.delta),
                    change.as_str().unwrap_or_default()
                )?;
            }
            s
        }
    };
    Ok(Rendered { config: cfg, text })
}
