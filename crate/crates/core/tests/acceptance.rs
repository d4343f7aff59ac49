//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use auctionlab::analytics::{
    expected_buyer_surplus, exponential_ratio_asymptotic, marginal_revenue, marginal_revenue_rate,
    per_bidder_surplus, revenue_surplus_ratio, surplus_delta_closed, surplus_delta_from_order_stats,
};
use auctionlab::orderstats::{expected_order_stat, OrderStatQuery};
use auctionlab::participation::{is_pareto_improvement, round_robin_exclusion, Party};
use auctionlab::reserve::{
    derivative_ratio, exponential_reserve_gain, pareto_ratio_threshold, revenue_derivative,
    revenue_with_reserve_quadrature, surplus_with_reserve, surplus_with_reserve_exponential, SurplusMethod,
};
use auctionlab::simulate::{
    estimate_auction, estimate_revenue_delta_with, estimate_surplus_delta_with, run_auction, Estimate, Estimator,
    DEFAULT_BLOCKS,
};
use auctionlab::ValuationDistribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIGMAS: f64 = 4.0;
const MOM: Estimator = Estimator::MedianOfMeans { blocks: DEFAULT_BLOCKS };

fn expo(rate: f64) -> ValuationDistribution {
    ValuationDistribution::exponential(rate).unwrap()
}
fn pareto(a: f64, v: f64) -> ValuationDistribution {
    ValuationDistribution::pareto(a, v).unwrap()
}
fn unif(lo: f64, hi: f64) -> ValuationDistribution {
    ValuationDistribution::uniform(lo, hi).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn describe(e: &Estimate, target: f64) -> String {
    format!("{:.6} ± {:.6} vs {target:.6} (z = {:+.2})", e.mean, e.std_error, e.z_score(target))
}

/// Criterion outcome: pass flag plus a one-line summary.
struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

fn all(parts: Vec<Verdict>) -> Verdict {
    let pass = parts.iter().all(|p| p.pass);
    let detail = parts
        .iter()
        .map(|p| if p.pass { p.detail.clone() } else { format!("FAILED[{}]", p.detail) })
        .collect::<Vec<_>>()
        .join("; ");
    Verdict { pass, detail }
}

fn timed(limit: Duration, body: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let v = body();
    let took = start.elapsed();
    all(vec![v, Verdict::new(took < limit, format!("{:.1}s < {}s", took.as_secs_f64(), limit.as_secs()))])
}

fn exponential_constant_surplus() -> Verdict {
    timed(Duration::from_secs(10), || {
        let exact = [0.5, 1.0, 2.5].iter().all(|&rate| {
            (2..=50).all(|m| expected_buyer_surplus(&expo(rate), m).unwrap() == 1.0 / rate)
        });
        let est = estimate_surplus_delta_with(&expo(1.0), 5, 1_000_000, 101, Estimator::SampleMean).unwrap();
        all(vec![
            Verdict::new(exact, "E p_m = 1/λ exactly, m ∈ [2,50]"),
            Verdict::new(est.brackets(0.0, SIGMAS), format!("paired delta n=5: {}", describe(&est, 0.0))),
        ])
    })
}

fn exponential_ratio() -> Verdict {
    let mut worst = 0.0f64;
    let ok = (10..=10_000u64).all(|m| {
        let exact = revenue_surplus_ratio(&expo(1.0), m).unwrap();
        let gap = (exact - exponential_ratio_asymptotic(m)).abs();
        worst = worst.max(gap * 2.0 * m as f64);
        gap <= 0.5 / m as f64
    });
    Verdict::new(ok, format!("|H_m - 1 - (ln m + γ - 1)| ≤ 1/(2m) on [10, 1e4], max gap·2m = {worst:.6}"))
}

fn pareto_surplus_delta() -> Verdict {
    timed(Duration::from_secs(60), || {
        let mut worst = 0.0f64;
        for a in [1.0, 2.5] {
            for v in [1.5, 2.0, 3.0, 10.0] {
                let d = pareto(a, v);
                for n in 2..=30u64 {
                    let closed = surplus_delta_closed(&d, n).unwrap();
                    let top = |m: u64| {
                        let e = |i| expected_order_stat(&OrderStatQuery::new(d, m, i).unwrap()).unwrap();
                        e(m) - e(m - 1)
                    };
                    worst = worst.max(rel(closed, top(n + 1) - top(n)));
                    worst = worst.max(rel(closed, surplus_delta_from_order_stats(&d, n).unwrap()));
                }
            }
        }
        let target = surplus_delta_closed(&pareto(1.0, 2.0), 2).unwrap();
        let est = estimate_surplus_delta_with(&pareto(1.0, 2.0), 2, 10_000_000, 303, MOM).unwrap();
        all(vec![
            Verdict::new(worst <= 1e-9, format!("g/(v²(n+1)) vs order-stat difference, max rel {worst:.2e}")),
            Verdict::new(
                (target - 0.26667).abs() < 5e-6 && est.brackets(target, SIGMAS),
                format!("paired MoM 1e7: {}", describe(&est, target)),
            ),
        ])
    })
}

fn pareto_ratio() -> Verdict {
    let mut worst = 0.0f64;
    for a in [0.5, 1.0, 7.0] {
        for v in [1.01, 1.5, 2.0, 3.0, 10.0] {
            for m in (2..=60).chain([100, 1000, 100_000]) {
                worst = worst.max(rel(revenue_surplus_ratio(&pareto(a, v), m).unwrap(), v - 1.0));
            }
        }
    }
    Verdict::new(worst <= 1e-12, format!("revenue/surplus = v - 1, max rel {worst:.2e}"))
}

fn marginal_rates() -> Verdict {
    let mut parts = Vec::new();
    let mut seed = 500;
    for (name, d) in [("uniform", unif(0.0, 1.0)), ("exponential", expo(1.0))] {
        for n in [2u64, 5, 10] {
            seed += 1;
            let exact = marginal_revenue(&d, n).unwrap();
            let est = estimate_revenue_delta_with(&d, n, 1_000_000, seed, Estimator::SampleMean).unwrap();
            parts.push(Verdict::new(est.brackets(exact, SIGMAS), format!("{name} n={n}: z={:+.2}", est.z_score(exact))));
        }
    }
    for v in [1.5, 2.0, 3.0] {
        let d = pareto(1.0, v);
        let gaps: Vec<f64> = [10u64, 100, 1000]
            .iter()
            .map(|&n| {
                let exact = marginal_revenue(&d, n).unwrap();
                assert!(exact > 0.0);
                (exact / marginal_revenue_rate(&d, n).unwrap().approx_value - 1.0).abs()
            })
            .collect();
        let positive = [10u64, 100, 1000].iter().all(|&n| marginal_revenue(&d, n).unwrap() > 0.0);
        parts.push(Verdict::new(
            positive && gaps[0] > gaps[1] && gaps[1] > gaps[2],
            format!("pareto v={v} |ratio-1| = {:.1e}, {:.1e}, {:.1e}", gaps[0], gaps[1], gaps[2]),
        ));
    }
    all(parts)
}

fn reserve_appendix() -> Verdict {
    let mut worst = 0.0f64;
    for n in 1..=20 {
        let q = surplus_with_reserve(&expo(1.0), n, 1.0, SurplusMethod::Quadrature).unwrap();
        worst = worst.max((q - surplus_with_reserve_exponential(1.0, n).unwrap()).abs());
    }
    let target = surplus_with_reserve_exponential(1.0, 2).unwrap();
    let est = estimate_auction(&expo(1.0), 2, Some(1.0), 1_000_000, 601, Estimator::SampleMean).unwrap().buyer_surplus;
    let a_part = all(vec![
        Verdict::new(worst <= 1e-8, format!("(a) closed form vs quadrature n ∈ [1,20], max {worst:.1e}")),
        Verdict::new(
            (target - 0.600423).abs() < 1e-6 && est.brackets(target, SIGMAS),
            format!("(a) MC surplus {}", describe(&est, target)),
        ),
    ]);

    let mut flat = 0.0f64;
    for a in [1.0, 2.5] {
        for k in [1.0, 2.0, 5.0, 10.0] {
            let h = revenue_with_reserve_quadrature(&pareto(a, 1.0), 3, k * a).unwrap().value;
            flat = flat.max((h - 3.0 * a).abs());
        }
    }
    let est = estimate_auction(&pareto(1.0, 1.0), 3, Some(5.0), 10_000_000, 602, MOM).unwrap().seller_revenue;
    let b_part = all(vec![
        Verdict::new(flat <= 1e-8, format!("(b) v=1 quadrature revenue = a·n, max dev {flat:.1e}")),
        Verdict::new(est.brackets(3.0, SIGMAS), format!("(b) MoM 1e7 revenue r=5 {}", describe(&est, 3.0))),
    ]);

    let mut negative = true;
    let mut fd_gap = 0.0f64;
    for a in [1.0, 3.0] {
        let d = pareto(a, 2.0);
        for n in [1u64, 2, 5] {
            for k in 1..=60 {
                let r = a * (1.0 + 0.15 * k as f64);
                let exact = revenue_derivative(&d, n, r).unwrap();
                negative &= exact < 0.0;
                let h = 1e-4 * a;
                let up = revenue_with_reserve_quadrature(&d, n, r + h).unwrap().value;
                let down = revenue_with_reserve_quadrature(&d, n, r - h).unwrap().value;
                fd_gap = fd_gap.max(((up - down) / (2.0 * h) - exact).abs());
            }
        }
    }
    let c_part = Verdict::new(
        negative && fd_gap <= 1e-4,
        format!("(c) v=2 h'(r) < 0 above a for n ∈ {{1,2,5}}, finite-difference gap {fd_gap:.1e}"),
    );
    all(vec![a_part, b_part, c_part])
}

fn discrepancy_probes() -> Verdict {
    let probe = exponential_reserve_gain(1.0, 2).unwrap();
    let claimed = (1.0 - (-1.0f64).exp()).powi(2);
    let gain = Verdict::new(
        (probe.measured_gain - 0.168).abs() <= 0.002 && (probe.measured_gain - claimed).abs() > 0.2,
        format!(
            "reserve revenue gain λ=1 n=2: {:.5} (expression (1-e^-1)^2 = {claimed:.4} equals the surplus given up, {:.4})",
            probe.measured_gain, probe.surplus_given_up
        ),
    );
    let mut worst = 0.0f64;
    let mut flagged = true;
    for (a, v) in [(1.0, 2.0), (2.0, 3.0), (0.5, 1.5), (4.0, 10.0)] {
        let d = pareto(a, v);
        for n in [1u64, 2, 5, 20, 100] {
            let t = pareto_ratio_threshold(&d, n).unwrap();
            worst = worst.max((derivative_ratio(&d, n, t.reserve).unwrap() - 1.0).abs());
            let expected = a * ((n + 1) as f64).powf(1.0 / v);
            worst = worst.max(rel(t.reserve, expected));
            flagged &= t.note.contains("(n+1)^(1/v)/a") && (a == 1.0 || t.printed_reserve != t.reserve);
        }
    }
    let threshold = Verdict::new(
        worst <= 1e-10 && flagged,
        format!("ratio crosses 1 at r = a(n+1)^(1/v), max |ratio-1| {worst:.1e}; printed form flagged in notes"),
    );
    all(vec![gain, threshold])
}

fn participation_properties() -> Verdict {
    let families = [
        ("uniform", unif(0.0, 1.0)),
        ("uniform", unif(2.0, 7.0)),
        ("exponential", expo(1.0)),
        ("exponential", expo(0.2)),
        ("pareto", pareto(1.0, 2.0)),
        ("pareto", pareto(3.0, 1.3)),
    ];
    let decreasing = families.iter().all(|(_, d)| {
        (2..10).all(|m| per_bidder_surplus(d, m + 1).unwrap() < per_bidder_surplus(d, m).unwrap())
    });
    let mut parts = vec![Verdict::new(decreasing, "E p_m / m strictly decreasing on [2,10]")];

    let mut gain_gap = 0.0f64;
    let mut verdicts_ok = true;
    for m in 3..=10usize {
        for (name, d) in [("exponential", expo(1.0)), ("pareto", pareto(1.0, 2.0)), ("uniform", unif(0.0, 1.0))] {
            let (old, new) = round_robin_exclusion(m, d).unwrap();
            let rep = is_pareto_improvement(&old, &new).unwrap();
            let want = expected_buyer_surplus(&d, m as u64).unwrap() - expected_buyer_surplus(&d, m as u64 - 1).unwrap();
            let scale = expected_buyer_surplus(&d, m as u64 - 1).unwrap();
            for i in 0..m {
                gain_gap = gain_gap.max((rep.delta_for(Party::Bidder(i)).unwrap() - want).abs() / scale);
            }
            let seller_only = rep.strict_parties == vec![Party::Seller];
            let everyone = rep.strict_parties.len() == m + 1 && rep.strict_parties[0] == Party::Seller;
            verdicts_ok &= match name {
                "exponential" => rep.verdict && seller_only,
                "pareto" => rep.verdict && everyone,
                _ => !rep.verdict && rep.worse_parties.len() == m,
            };
        }
    }
    parts.push(Verdict::new(gain_gap <= 1e-12, format!("round-robin gain = E p_m - E p_(m-1), max rel {gain_gap:.1e}")));
    parts.push(Verdict::new(
        verdicts_ok,
        "verdicts m ∈ [3,10]: exponential true via seller, pareto v=2 true via all, uniform false",
    ));
    all(parts)
}

fn engine_properties() -> Verdict {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let a = estimate_auction(&pareto(1.0, 1.5), 4, Some(2.0), 200_000, 901, MOM).unwrap();
            let d = estimate_surplus_delta_with(&expo(2.0), 3, 200_000, 902, Estimator::SampleMean).unwrap();
            serde_json::to_string(&(a, d)).unwrap()
        })
    };
    let max_threads = std::thread::available_parallelism().map_or(8, |n| n.get()).max(2);
    let determinism = Verdict::new(run(1) == run(max_threads), format!("JSON identical on 1 and {max_threads} threads"));

    let mut rng = ChaCha8Rng::seed_from_u64(903);
    let mut violations = 0u32;
    for _ in 0..100_000 {
        let count = rng.gen_range(1..=8);
        let coarse = rng.gen_bool(0.3);
        let values: Vec<f64> = (0..count)
            .map(|_| if coarse { rng.gen_range(0..4) as f64 } else { rng.gen_range(0.0..10.0) })
            .collect();
        let reserve = rng.gen_bool(0.5).then(|| rng.gen_range(0.0..8.0));
        let tie_seed: u64 = rng.gen();
        let out = run_auction(&values, reserve, &mut ChaCha8Rng::seed_from_u64(tie_seed)).unwrap();
        let consistent = match out.winner {
            None => !out.sold && out.price == 0.0 && out.surplus == 0.0,
            Some(w) => out.sold && out.price <= values[w] && out.surplus == values[w] - out.price,
        };
        let mut ok = consistent && out.surplus >= 0.0;
        if let Some(w) = out.winner {
            let mut raised = values.clone();
            raised[w] += rng.gen_range(0.0..5.0) + 1e-9;
            let again = run_auction(&raised, reserve, &mut ChaCha8Rng::seed_from_u64(tie_seed)).unwrap();
            ok &= again.winner == Some(w) && again.price == out.price;
        }
        violations += u32::from(!ok);
    }
    let truthful = Verdict::new(violations == 0, format!("run_auction 1e5 cases, {violations} violations"));
    all(vec![determinism, truthful])
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exponential constant surplus", exponential_constant_surplus),
        ("exponential revenue/surplus ratio", exponential_ratio),
        ("pareto surplus delta", pareto_surplus_delta),
        ("pareto revenue/surplus ratio", pareto_ratio),
        ("marginal revenue rates", marginal_rates),
        ("reserve prices", reserve_appendix),
        ("known-discrepancy probes", discrepancy_probes),
        ("participation properties", participation_properties),
        ("engine properties", engine_properties),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        println!("{} {} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, k + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
