mod commands;
mod config;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{EstimatorChoice, Format, RunConfig};

const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

/// Expected buyer surplus and seller revenue in second-price auctions.
#[derive(Parser, Debug)]
#[command(name = "auctionlab", version)]
struct Cli {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, value_enum, global = true)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form surplus/revenue table over a range of bidder counts.
    Table(TableArgs),
    /// Monte Carlo estimates for one auction configuration.
    Simulate(SimulateArgs),
    /// Revenue, surplus and revenue derivative over a grid of reserve prices.
    ReserveScan(ReserveArgs),
    /// Compare two participation arrangements.
    Participation(ParticipationArgs),
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Distribution JSON, e.g. '{"family":"exponential","lambda":1}'.
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    m_min: Option<u64>,
    #[arg(long)]
    m_max: Option<u64>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    bidders: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    reserve: Option<f64>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    estimator: Option<EstimatorChoice>,
    /// Median-of-means block count.
    #[arg(long)]
    blocks: Option<usize>,
    /// Estimate the paired surplus change from adding bidder n+1 to n = --bidders.
    #[arg(long)]
    paired: bool,
}

#[derive(Args, Debug)]
struct ReserveArgs {
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    bidders: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    r_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r_max: Option<f64>,
    /// Number of evenly spaced reserves, endpoints included.
    #[arg(long)]
    r_steps: Option<usize>,
}

#[derive(Args, Debug)]
struct ParticipationArgs {
    /// Membership CSV of the current arrangement (rows bidders, columns auctions).
    #[arg(long)]
    old: Option<PathBuf>,
    /// Sidecar JSON for --old; defaults to the CSV path with a .json extension.
    #[arg(long)]
    old_sidecar: Option<PathBuf>,
    #[arg(long)]
    new: Option<PathBuf>,
    #[arg(long)]
    new_sidecar: Option<PathBuf>,
    /// Build the round-robin exclusion design for this many bidders instead of reading files.
    #[arg(long)]
    round_robin: Option<usize>,
    #[arg(long)]
    dist: Option<String>,
}

fn parse_dist(text: Option<String>) -> Result<Option<serde_json::Value>> {
    text.map(|t| serde_json::from_str(&t).context("--dist is not valid JSON")).transpose()
}

fn flags_of(cli: Cli) -> Result<(RunConfig, Option<PathBuf>)> {
    let mut flags = RunConfig { output: cli.output, format: cli.format, ..Default::default() };
    match cli.command {
        None => {}
        Some(Command::Table(a)) => {
            flags.subcommand = Some("table".into());
            flags.dist = parse_dist(a.dist)?;
            flags.m_min = a.m_min;
            flags.m_max = a.m_max;
        }
        Some(Command::Simulate(a)) => {
            flags.subcommand = Some("simulate".into());
            flags.dist = parse_dist(a.dist)?;
            flags.bidders = a.bidders;
            flags.reserve = a.reserve;
            flags.reps = a.reps;
            flags.seed = a.seed;
            flags.estimator = a.estimator;
            flags.blocks = a.blocks;
            flags.paired = a.paired.then_some(true);
        }
        Some(Command::ReserveScan(a)) => {
            flags.subcommand = Some("reserve-scan".into());
            flags.dist = parse_dist(a.dist)?;
            flags.bidders = a.bidders;
            flags.r_min = a.r_min;
            flags.r_max = a.r_max;
            flags.r_steps = a.r_steps;
        }
        Some(Command::Participation(a)) => {
            flags.subcommand = Some("participation".into());
            flags.dist = parse_dist(a.dist)?;
            flags.old = a.old;
            flags.old_sidecar = a.old_sidecar;
            flags.new = a.new;
            flags.new_sidecar = a.new_sidecar;
            flags.round_robin = a.round_robin;
        }
    }
    Ok((flags, cli.config))
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("AUCTIONLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("AUCTIONLAB_THREADS={raw} is not a count"))?;
    if n == 0 {
        bail!("AUCTIONLAB_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let (flags, config_path) = flags_of(cli)?;
    let file = match &config_path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let (Some(a), Some(b)) = (&file.subcommand, &flags.subcommand) {
        if a != b {
            bail!("config file is for `{a}` but `{b}` was requested");
        }
    }
    let cfg = file.overridden_by(flags);
    let rendered = match cfg.subcommand.as_deref() {
        Some("table") => commands::table(cfg)?,
        Some("simulate") => commands::simulate(cfg)?,
        Some("reserve-scan") => commands::reserve_scan_cmd(cfg)?,
        Some("participation") => commands::participation(cfg)?,
        Some(other) => bail!("unknown subcommand `{other}`"),
        None => bail!("no subcommand given (on the command line or as `subcommand` in --config)"),
    };
    match &rendered.config.output {
        Some(path) => fs::write(path, &rendered.text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", rendered.text),
    }
    Ok(())
}

/// Mathematical errors from the library exit with 3, everything else with 2.
fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|cause| cause.downcast_ref::<auctionlab::Error>())
        .map_or(EXIT_CONFIG, |e| if e.is_domain() { EXIT_DOMAIN } else { EXIT_CONFIG })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
