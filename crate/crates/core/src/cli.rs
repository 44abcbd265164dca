//! `ilhedge` command-line front end.
//!
//! Scenarios are JSON, curves are CSV with every number printed to 17
//! significant digits, reports are JSON. Exit codes: 0 success (or covered),
//! 2 usage, 3 data, 4 infeasible / not covered.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::amm::{PoolPosition, Price};
use crate::error::{Error, OptionKind};
use crate::hedging::{
    check_proposition, solve_min_strangle, CoverageReport, HedgeBand, HedgedPosition, Strangle,
};
use crate::pricing::{BlackScholes, MarketParams, OptionQuotes, QuoteRow, QuoteTable};
use crate::replication::{
    build_portfolio, replication_error, ImpermanentLoss, Negated, Quadratic, ReplicationFit,
    ReplicationPortfolio, SmoothPayoff, StrikeGrid, DEFAULT_KMAX_MULTIPLE, DEFAULT_KMIN_FRACTION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

/// Environment variable capping the worker thread count (0 = automatic).
pub const THREADS_ENV: &str = "ILHEDGE_THREADS";

const DEFAULT_CURVE_STEPS: usize = 200;
const DEFAULT_GRID_CELLS: usize = 2000;
const HEDGE_CURVE_MARGIN: f64 = 0.2;

#[derive(Debug, Parser)]
#[command(
    name = "ilhedge",
    version,
    about = "Impermanent loss, static replication and strangle hedging for constant-product pools"
)]
pub struct Cli {
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output path for the primary output; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pool value, hold value, IL and IL slope over a geometric price grid (CSV).
    IlCurve(CurveArgs),
    /// Static replication portfolio of the IL (or a test payoff) as JSON.
    Replicate(ReplicateArgs),
    /// Solve or check a strangle hedge; JSON report plus PnL curve CSV.
    Hedge(HedgeArgs),
}

#[derive(Debug, clap::Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    /// Number of intervals; the curve has `steps + 1` rows.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PayoffChoice {
    /// Impermanent loss of the scenario pool.
    Il,
    /// Negated impermanent loss (the hedge).
    NegIl,
    /// `(P - m)^2`, a test payoff with constant curvature.
    Quadratic,
}

#[derive(Debug, clap::Args)]
pub struct ReplicateArgs {
    #[arg(long, value_enum, default_value = "il")]
    pub payoff: PayoffChoice,
    /// Cells per side of the strike grid.
    #[arg(long)]
    pub grid_cells: Option<usize>,
    /// Lowest strike cutoff (default m/100).
    #[arg(long)]
    pub kmin: Option<f64>,
    /// Upper truncation strike (default 10 m).
    #[arg(long)]
    pub kmax: Option<f64>,
    /// Expansion point m (default the entry price).
    #[arg(long)]
    pub center: Option<f64>,
    /// Number of probe intervals for the error report.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct HedgeArgs {
    /// Where to write the PnL curve CSV.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

/// Failure of a CLI run, mapped onto the exit-code contract.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("scenario field `{field}`: {message}")]
    Scenario { field: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) | CliError::Scenario { .. } => EXIT_DATA,
        }
    }
}

fn field_err(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Scenario {
        field: field.to_string(),
        message: e.to_string(),
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e.to_string())
    }
}

// ---------------------------------------------------------------- scenario

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPool {
    capital: Option<f64>,
    entry_price: Option<f64>,
    risky_amount: Option<f64>,
    numeraire_amount: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarket {
    spot: f64,
    rate: f64,
    volatility: f64,
    expiry: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawQuotes {
    Path(PathBuf),
    Inline(Vec<QuoteRow>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBand {
    lower: f64,
    upper: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrangle {
    put_strike: f64,
    call_strike: f64,
    put_qty: f64,
    call_qty: f64,
    put_premium: Option<f64>,
    call_premium: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    from: Option<f64>,
    to: Option<f64>,
    steps: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    pool: RawPool,
    market: Option<RawMarket>,
    quotes: Option<RawQuotes>,
    bond_price: Option<f64>,
    band: Option<RawBand>,
    strangle: Option<RawStrangle>,
    pool_return_rate: Option<f64>,
    #[serde(default)]
    output: RawOutput,
}

/// Premium source configured by a scenario.
#[derive(Debug, Clone)]
pub enum Pricer {
    Model(BlackScholes),
    Table { table: QuoteTable, bond_price: f64 },
}

impl Pricer {
    pub fn bond_price(&self) -> f64 {
        match self {
            Pricer::Model(m) => m.discount_bond(),
            Pricer::Table { bond_price, .. } => *bond_price,
        }
    }
}

impl OptionQuotes for Pricer {
    fn call(&self, strike: f64) -> crate::Result<f64> {
        match self {
            Pricer::Model(m) => m.call(strike),
            Pricer::Table { table, .. } => table.call(strike),
        }
    }

    fn put(&self, strike: f64) -> crate::Result<f64> {
        match self {
            Pricer::Model(m) => m.put(strike),
            Pricer::Table { table, .. } => table.put(strike),
        }
    }
}

/// Strangle as given in a scenario; missing premiums come from the pricer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrangleSpec {
    pub put_strike: f64,
    pub call_strike: f64,
    pub put_qty: f64,
    pub call_qty: f64,
    pub put_premium: Option<f64>,
    pub call_premium: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OutputControls {
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
}

/// Validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub pool: PoolPosition,
    pub pricer: Option<Pricer>,
    pub band: Option<HedgeBand>,
    pub strangle: Option<StrangleSpec>,
    pub pool_return_rate: Option<f64>,
    pub output: OutputControls,
}

impl Scenario {
    /// Parses a scenario; relative quote-table paths resolve against `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let raw: RawScenario =
            serde_json::from_str(text).map_err(|e| CliError::Data(format!("scenario: {e}")))?;
        Self::validate(raw, base_dir)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_json(&text, base)
    }

    fn validate(raw: RawScenario, base_dir: &Path) -> Result<Self, CliError> {
        let pool = match raw.pool {
            RawPool {
                capital: Some(c),
                entry_price: Some(p0),
                risky_amount: None,
                numeraire_amount: None,
            } => PoolPosition::from_capital(c, p0),
            RawPool {
                capital: None,
                entry_price,
                risky_amount: Some(x),
                numeraire_amount: Some(y),
            } => match entry_price {
                Some(p0) => PoolPosition::from_reserves_at_price(x, y, p0),
                None => PoolPosition::from_reserves(x, y),
            },
            _ => {
                return Err(field_err(
                    "pool",
                    "give either {capital, entry_price} or {risky_amount, numeraire_amount[, entry_price]}",
                ))
            }
        }
        .map_err(|e| field_err("pool", e))?;

        let pricer = match (raw.market, raw.quotes) {
            (Some(_), Some(_)) => {
                return Err(field_err(
                    "quotes",
                    "give either `market` or `quotes`, not both",
                ))
            }
            (Some(m), None) => {
                if raw.bond_price.is_some() {
                    return Err(field_err(
                        "bond_price",
                        "only used with `quotes`; the model derives it from `market.rate`",
                    ));
                }
                let mp = MarketParams::new(m.spot, m.rate, m.volatility, m.expiry)
                    .map_err(|e| field_err("market", e))?;
                Some(Pricer::Model(BlackScholes::new(mp)))
            }
            (None, Some(q)) => {
                let table = match q {
                    RawQuotes::Path(p) => QuoteTable::from_path(base_dir.join(p)),
                    RawQuotes::Inline(rows) => QuoteTable::from_rows(rows),
                }
                .map_err(|e| field_err("quotes", e))?;
                let bond_price = raw.bond_price.unwrap_or(1.0);
                if !(bond_price.is_finite() && bond_price > 0.0) {
                    return Err(field_err("bond_price", "must be positive"));
                }
                Some(Pricer::Table { table, bond_price })
            }
            (None, None) => None,
        };

        let band = raw
            .band
            .map(|b| {
                let band = HedgeBand::new(b.lower, b.upper).map_err(|e| field_err("band", e))?;
                band.ensure_contains_entry(&pool)
                    .map_err(|e| field_err("band", e))?;
                Ok::<_, CliError>(band)
            })
            .transpose()?;

        let strangle = raw.strangle.map(|s| StrangleSpec {
            put_strike: s.put_strike,
            call_strike: s.call_strike,
            put_qty: s.put_qty,
            call_qty: s.call_qty,
            put_premium: s.put_premium,
            call_premium: s.call_premium,
        });
        if let Some(r) = raw.pool_return_rate {
            if !(r.is_finite() && r >= 0.0) {
                return Err(field_err("pool_return_rate", "must be non-negative"));
            }
        }

        Ok(Self {
            pool,
            pricer,
            band,
            strangle,
            pool_return_rate: raw.pool_return_rate,
            output: OutputControls {
                from: raw.output.from,
                to: raw.output.to,
                steps: raw.output.steps,
            },
        })
    }

    fn require_band(&self) -> Result<HedgeBand, CliError> {
        self.band
            .ok_or_else(|| field_err("band", "required for this command"))
    }

    fn require_return(&self) -> Result<f64, CliError> {
        self.pool_return_rate
            .ok_or_else(|| field_err("pool_return_rate", "required for this command"))
    }

    fn require_pricer(&self, why: &str) -> Result<&Pricer, CliError> {
        self.pricer.as_ref().ok_or_else(|| {
            field_err(
                "market",
                format!("a `market` or `quotes` entry is required {why}"),
            )
        })
    }

    /// Resolves the scenario strangle, pricing missing premiums.
    fn resolve_strangle(&self, spec: &StrangleSpec) -> Result<Strangle, CliError> {
        let mut missing = Vec::new();
        let mut premium =
            |given: Option<f64>, kind: OptionKind, strike: f64| -> Result<f64, CliError> {
                if let Some(v) = given {
                    return Ok(v);
                }
                let pricer = self.require_pricer("to price strangle premiums")?;
                match pricer.quote(kind, strike) {
                    Ok(v) => Ok(v),
                    Err(Error::MissingQuotes(m)) => {
                        missing.extend(m);
                        Ok(0.0)
                    }
                    Err(e) => Err(field_err("strangle", e)),
                }
            };
        let put_premium = premium(spec.put_premium, OptionKind::Put, spec.put_strike)?;
        let call_premium = premium(spec.call_premium, OptionKind::Call, spec.call_strike)?;
        if !missing.is_empty() {
            return Err(Error::MissingQuotes(missing).into());
        }
        Strangle::new(
            spec.put_strike,
            spec.call_strike,
            spec.put_qty,
            spec.call_qty,
            put_premium,
            call_premium,
        )
        .map_err(|e| field_err("strangle", e))
    }
}

// ---------------------------------------------------------------- formatting

/// 17 significant digits, scientific notation; `-0` prints as `0`.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn write_csv_row(out: &mut String, values: &[f64]) {
    let row: Vec<String> = values.iter().map(|&v| fmt_num(v)).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

/// `steps + 1` geometrically spaced prices from `from` to `to`.
pub fn geometric_prices(from: f64, to: f64, steps: usize) -> Vec<f64> {
    let ratio = to / from;
    (0..=steps)
        .map(|i| {
            if i == steps {
                to
            } else {
                from * ratio.powf(i as f64 / steps as f64)
            }
        })
        .collect()
}

/// `steps + 1` evenly spaced prices from `from` to `to`.
pub fn linear_prices(from: f64, to: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| {
            if i == steps {
                to
            } else {
                from + (to - from) * (i as f64 / steps as f64)
            }
        })
        .collect()
}

fn check_range(from: f64, to: f64, steps: usize) -> Result<(), CliError> {
    if !(from.is_finite() && to.is_finite() && from > 0.0 && from < to) {
        return Err(CliError::Usage(format!(
            "price range must satisfy 0 < from < to, got [{from}, {to}]"
        )));
    }
    if steps < 2 {
        return Err(CliError::Usage(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- commands

/// `price,v_pool,v_hold,il,il_slope` rows.
pub fn il_curve_csv(
    pool: &PoolPosition,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<String, CliError> {
    check_range(from, to, steps)?;
    let mut out = String::from("price,v_pool,v_hold,il,il_slope\n");
    for p in geometric_prices(from, to, steps) {
        let price = Price::new(p)?;
        write_csv_row(
            &mut out,
            &[
                p,
                pool.value_pool(price),
                pool.value_hold(price),
                pool.il(price),
                pool.il_slope(price),
            ],
        );
    }
    Ok(out)
}

pub fn cmd_il_curve(scenario: &Scenario, args: &CurveArgs) -> Result<String, CliError> {
    let p0 = scenario.pool.entry_price();
    let from = args.from.or(scenario.output.from).unwrap_or(p0 / 4.0);
    let to = args.to.or(scenario.output.to).unwrap_or(4.0 * p0);
    let steps = args
        .steps
        .or(scenario.output.steps)
        .unwrap_or(DEFAULT_CURVE_STEPS);
    il_curve_csv(&scenario.pool, from, to, steps)
}

#[derive(Debug, Serialize)]
struct GridSummary {
    center: f64,
    k_min: f64,
    k_max: f64,
    cells_per_side: usize,
}

#[derive(Debug, Serialize)]
struct ErrorSummary {
    #[serde(flatten)]
    fit: ReplicationFit,
    probe_from: f64,
    probe_to: f64,
    probe_count: usize,
}

#[derive(Debug, Serialize)]
struct ReplicateOutput {
    payoff: String,
    grid: GridSummary,
    portfolio: ReplicationPortfolio,
    bond_price: Option<f64>,
    present_value: Option<f64>,
    replication_error: ErrorSummary,
    warnings: Vec<String>,
}

pub fn cmd_replicate(scenario: &Scenario, args: &ReplicateArgs) -> Result<String, CliError> {
    let pool = scenario.pool;
    let m = args.center.unwrap_or(pool.entry_price());
    if !(m.is_finite() && m > 0.0) {
        return Err(CliError::Usage(format!(
            "--center must be positive, got {m}"
        )));
    }
    let cells = args.grid_cells.unwrap_or(DEFAULT_GRID_CELLS);
    if cells == 0 {
        return Err(CliError::Usage("--grid-cells must be at least 1".into()));
    }
    let k_min = args.kmin.unwrap_or(m * DEFAULT_KMIN_FRACTION);
    let k_max = args.kmax.unwrap_or(m * DEFAULT_KMAX_MULTIPLE);
    let grid = StrikeGrid::uniform(m, k_min, k_max, cells, cells)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let payoff: Box<dyn SmoothPayoff> = match args.payoff {
        PayoffChoice::Il => Box::new(ImpermanentLoss(pool)),
        PayoffChoice::NegIl => Box::new(Negated(ImpermanentLoss(pool))),
        PayoffChoice::Quadratic => Box::new(Quadratic { center: m }),
    };
    let portfolio = build_portfolio(&payoff, &grid)?;

    let (bond_price, present_value) = match &scenario.pricer {
        Some(pricer) => {
            let b = pricer.bond_price();
            (Some(b), Some(portfolio.present_value(b, pricer)?))
        }
        None => (None, None),
    };

    let (probe_from, probe_to) = match scenario.band {
        Some(b) if b.lower() < b.upper() => (b.lower(), b.upper()),
        _ => (
            scenario.output.from.unwrap_or(m / 4.0),
            scenario.output.to.unwrap_or(4.0 * m),
        ),
    };
    let steps = args
        .steps
        .or(scenario.output.steps)
        .unwrap_or(DEFAULT_GRID_CELLS);
    check_range(probe_from, probe_to, steps)?;
    let probes = linear_prices(probe_from, probe_to, steps);
    let fit = replication_error(&portfolio, &payoff, &probes)?;

    let out = ReplicateOutput {
        payoff: payoff.description(),
        grid: GridSummary {
            center: m,
            k_min,
            k_max,
            cells_per_side: cells,
        },
        warnings: portfolio.warnings.clone(),
        portfolio,
        bond_price,
        present_value,
        replication_error: ErrorSummary {
            fit,
            probe_from,
            probe_to,
            probe_count: probes.len(),
        },
    };
    Ok(to_json(&out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HedgeStatus {
    Covered,
    NotCovered,
    Infeasible,
}

#[derive(Debug, Serialize)]
struct HedgeOutput {
    status: HedgeStatus,
    solved: bool,
    pool_return_rate: f64,
    band: HedgeBand,
    strangle: Strangle,
    report: CoverageReport,
}

/// Outcome of `hedge`: JSON report, PnL curve CSV and the exit code.
#[derive(Debug, Clone)]
pub struct HedgeRun {
    pub status: HedgeStatus,
    pub report_json: String,
    pub curve_csv: String,
}

impl HedgeRun {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            HedgeStatus::Covered => EXIT_OK,
            HedgeStatus::NotCovered | HedgeStatus::Infeasible => EXIT_INFEASIBLE,
        }
    }
}

/// `price,pnl_pool_hold,pnl_strangle,pnl_total` rows, where `pnl_pool_hold`
/// is the pool return plus IL and `pnl_strangle` is payoff minus cost.
pub fn hedge_curve_csv(hp: &HedgedPosition, prices: &[f64]) -> Result<String, CliError> {
    let mut out = String::from("price,pnl_pool_hold,pnl_strangle,pnl_total\n");
    let carry = hp.pool_return_rate * hp.pool.capital();
    let cost = hp.strangle.total_cost();
    for &p in prices {
        let price = Price::new(p)?;
        write_csv_row(
            &mut out,
            &[
                p,
                carry + hp.pool.il(price),
                hp.strangle.payoff(price) - cost,
                hp.total_pnl(price),
            ],
        );
    }
    Ok(out)
}

pub fn cmd_hedge(scenario: &Scenario, args: &HedgeArgs) -> Result<HedgeRun, CliError> {
    let band = scenario.require_band()?;
    let r_p = scenario.require_return()?;

    let (strangle, solved, feasible) = match &scenario.strangle {
        Some(spec) => (scenario.resolve_strangle(spec)?, false, true),
        None => {
            let pricer = scenario.require_pricer("to solve for the minimal strangle")?;
            let sol = solve_min_strangle(&scenario.pool, &band, pricer, r_p)?;
            (*sol.strangle(), true, sol.is_feasible())
        }
    };
    let hp = HedgedPosition::new(scenario.pool, strangle, r_p)?;
    let report = check_proposition(&hp, &band)?;
    let status = if !feasible {
        HedgeStatus::Infeasible
    } else if report.covered {
        HedgeStatus::Covered
    } else {
        HedgeStatus::NotCovered
    };

    // the scenario's price range is for il-curve; this curve follows the band
    let from = args
        .from
        .unwrap_or(band.lower() * (1.0 - HEDGE_CURVE_MARGIN));
    let to = args.to.unwrap_or(band.upper() * (1.0 + HEDGE_CURVE_MARGIN));
    let steps = args
        .steps
        .or(scenario.output.steps)
        .unwrap_or(DEFAULT_CURVE_STEPS);
    check_range(from, to, steps)?;
    let curve_csv = hedge_curve_csv(&hp, &linear_prices(from, to, steps))?;

    let out = HedgeOutput {
        status,
        solved,
        pool_return_rate: r_p,
        band,
        strangle,
        report,
    };
    Ok(HedgeRun {
        status,
        report_json: to_json(&out),
        curve_csv,
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable output");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- driver

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a non-negative integer, got `{raw}`"
        ))
    })?;
    if n > 0 {
        // a second call fails harmlessly when the pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(format!("stdout: {e}"))),
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    configure_threads()?;
    let config = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Usage("--config <path> is required".into()))?;
    let scenario = Scenario::from_path(config)?;
    match &cli.command {
        Command::IlCurve(args) => {
            let csv = cmd_il_curve(&scenario, args)?;
            write_output(cli.out.as_deref(), &csv, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Replicate(args) => {
            let json = cmd_replicate(&scenario, args)?;
            write_output(cli.out.as_deref(), &json, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Hedge(args) => {
            let run = cmd_hedge(&scenario, args)?;
            write_output(cli.out.as_deref(), &run.report_json, stdout)?;
            if let Some(curve) = &args.curve {
                write_output(Some(curve), &run.curve_csv, stdout)?;
            }
            Ok(run.exit_code())
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "ilhedge: {e}");
            e.exit_code()
        }
    }
}
