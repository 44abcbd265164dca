//! Static replication of a smooth payoff with a bond, an at-the-money
//! call/put pair and a strip of out-of-the-money options.
//!
//! For a twice-differentiable `f` and an expansion point `m`,
//!
//! ```text
//! f(P) = f(m) + f'(m) [(P - m)^+ - (m - P)^+]
//!      + ∫_0^m f''(K) (K - P)^+ dK + ∫_m^∞ f''(K) (P - K)^+ dK
//! ```
//!
//! The two integrals are discretised with the midpoint rule on a
//! [`StrikeGrid`]: each cell contributes one option struck at the cell
//! midpoint with quantity `f''(K) * width`. The upper integral is truncated
//! at `K_max` and the lower one starts at `K_min`; truncation shows up in
//! [`replication_error`] rather than being hidden.

use serde::{Deserialize, Serialize};

use crate::amm::{PoolPosition, Price};
use crate::error::{Error, OptionKind, Result};
use crate::pricing::OptionQuotes;

/// Default lower strike cutoff as a fraction of the expansion point.
pub const DEFAULT_KMIN_FRACTION: f64 = 0.01;
/// Default upper strike cutoff as a multiple of the expansion point.
pub const DEFAULT_KMAX_MULTIPLE: f64 = 10.0;
/// Relative tolerance of the derivative self-check.
pub const SELF_CHECK_TOL: f64 = 1e-4;

/// A twice-differentiable payoff on positive prices.
pub trait SmoothPayoff {
    fn value_at(&self, p: f64) -> f64;
    fn slope_at(&self, p: f64) -> f64;
    fn curvature_at(&self, p: f64) -> f64;
    fn description(&self) -> String;
}

impl<T: SmoothPayoff + ?Sized> SmoothPayoff for &T {
    fn value_at(&self, p: f64) -> f64 {
        (**self).value_at(p)
    }
    fn slope_at(&self, p: f64) -> f64 {
        (**self).slope_at(p)
    }
    fn curvature_at(&self, p: f64) -> f64 {
        (**self).curvature_at(p)
    }
    fn description(&self) -> String {
        (**self).description()
    }
}

impl<T: SmoothPayoff + ?Sized> SmoothPayoff for Box<T> {
    fn value_at(&self, p: f64) -> f64 {
        (**self).value_at(p)
    }
    fn slope_at(&self, p: f64) -> f64 {
        (**self).slope_at(p)
    }
    fn curvature_at(&self, p: f64) -> f64 {
        (**self).curvature_at(p)
    }
    fn description(&self) -> String {
        (**self).description()
    }
}

/// Impermanent loss of a pool position as a function of the exit price.
#[derive(Debug, Clone, Copy)]
pub struct ImpermanentLoss(pub PoolPosition);

impl SmoothPayoff for ImpermanentLoss {
    fn value_at(&self, p: f64) -> f64 {
        Price::new(p).map_or(f64::NAN, |p| self.0.il(p))
    }
    fn slope_at(&self, p: f64) -> f64 {
        Price::new(p).map_or(f64::NAN, |p| self.0.il_slope(p))
    }
    fn curvature_at(&self, p: f64) -> f64 {
        Price::new(p).map_or(f64::NAN, |p| self.0.il_curvature(p))
    }
    fn description(&self) -> String {
        format!(
            "impermanent loss (c={}, P0={})",
            self.0.capital(),
            self.0.entry_price()
        )
    }
}

/// `(P - center)^2`.
#[derive(Debug, Clone, Copy)]
pub struct Quadratic {
    pub center: f64,
}

impl SmoothPayoff for Quadratic {
    fn value_at(&self, p: f64) -> f64 {
        (p - self.center) * (p - self.center)
    }
    fn slope_at(&self, p: f64) -> f64 {
        2.0 * (p - self.center)
    }
    fn curvature_at(&self, _p: f64) -> f64 {
        2.0
    }
    fn description(&self) -> String {
        format!("(P - {})^2", self.center)
    }
}

/// `intercept + slope * P`.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub intercept: f64,
    pub slope: f64,
}

impl SmoothPayoff for Affine {
    fn value_at(&self, p: f64) -> f64 {
        self.intercept + self.slope * p
    }
    fn slope_at(&self, _p: f64) -> f64 {
        self.slope
    }
    fn curvature_at(&self, _p: f64) -> f64 {
        0.0
    }
    fn description(&self) -> String {
        format!("{} + {} P", self.intercept, self.slope)
    }
}

/// `-f`. Hedging a payoff means replicating its negation.
#[derive(Debug, Clone, Copy)]
pub struct Negated<P>(pub P);

impl<P: SmoothPayoff> SmoothPayoff for Negated<P> {
    fn value_at(&self, p: f64) -> f64 {
        -self.0.value_at(p)
    }
    fn slope_at(&self, p: f64) -> f64 {
        -self.0.slope_at(p)
    }
    fn curvature_at(&self, p: f64) -> f64 {
        -self.0.curvature_at(p)
    }
    fn description(&self) -> String {
        format!("-[{}]", self.0.description())
    }
}

type PriceFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Payoff assembled from three closures.
pub struct FnPayoff {
    pub value: PriceFn,
    pub slope: PriceFn,
    pub curvature: PriceFn,
    pub label: String,
}

impl SmoothPayoff for FnPayoff {
    fn value_at(&self, p: f64) -> f64 {
        (self.value)(p)
    }
    fn slope_at(&self, p: f64) -> f64 {
        (self.slope)(p)
    }
    fn curvature_at(&self, p: f64) -> f64 {
        (self.curvature)(p)
    }
    fn description(&self) -> String {
        self.label.clone()
    }
}

/// Checks that `slope_at` and `curvature_at` agree with central differences
/// of `value_at` and `slope_at` at every probe price.
pub fn self_check<F: SmoothPayoff + ?Sized>(payoff: &F, probes: &[f64]) -> Result<()> {
    let fail = |price: f64, detail: String| Error::PayoffSelfCheck {
        label: payoff.description(),
        price,
        detail,
    };
    for &p in probes {
        if !(p.is_finite() && p > 0.0) {
            return Err(fail(p, "probe price must be positive".into()));
        }
        let h = p * 1e-4;
        let (lo, hi) = (p - h, p + h);
        let value = payoff.value_at(p);
        let slope = payoff.slope_at(p);
        let curv = payoff.curvature_at(p);
        // magnitudes of f, f', f'' expressed in the units of each derivative
        let slope_scale = slope.abs().max(value.abs() / p).max(curv.abs() * p);
        let curv_scale = curv.abs().max(slope.abs() / p).max(value.abs() / (p * p));

        let fd = (payoff.value_at(hi) - payoff.value_at(lo)) / (2.0 * h);
        if !slope.is_finite() || (fd - slope).abs() > SELF_CHECK_TOL * slope_scale.max(fd.abs()) {
            return Err(fail(p, format!("slope {slope} vs finite difference {fd}")));
        }

        let fd = (payoff.slope_at(hi) - payoff.slope_at(lo)) / (2.0 * h);
        if !curv.is_finite() || (fd - curv).abs() > SELF_CHECK_TOL * curv_scale.max(fd.abs()) {
            return Err(fail(
                p,
                format!("curvature {curv} vs finite difference {fd}"),
            ));
        }
    }
    Ok(())
}

/// One quadrature cell: an option struck at the cell midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub strike: f64,
    pub width: f64,
}

/// Strikes used to discretise the two replication integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct StrikeGrid {
    center: f64,
    lower: Vec<Cell>,
    upper: Vec<Cell>,
    k_max: f64,
}

impl StrikeGrid {
    pub fn new(center: f64, lower: Vec<Cell>, upper: Vec<Cell>, k_max: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidGrid(msg));
        if !(center.is_finite() && center > 0.0) {
            return bad(format!("center must be positive, got {center}"));
        }
        for c in lower.iter().chain(&upper) {
            if !(c.strike.is_finite() && c.strike > 0.0) {
                return bad(format!("strike must be positive, got {}", c.strike));
            }
            if !(c.width.is_finite() && c.width > 0.0) {
                return bad(format!("cell width must be positive, got {}", c.width));
            }
        }
        for side in [&lower, &upper] {
            if side.windows(2).any(|w| w[0].strike >= w[1].strike) {
                return bad("strikes must be strictly ascending".into());
            }
        }
        if lower.last().is_some_and(|c| c.strike >= center) {
            return bad("lower strikes must lie below the center".into());
        }
        if upper.first().is_some_and(|c| c.strike <= center) {
            return bad("upper strikes must lie above the center".into());
        }
        if !k_max.is_finite() || upper.last().is_some_and(|c| c.strike > k_max) {
            return bad(format!("K_max {k_max} is below the highest strike"));
        }
        Ok(Self {
            center,
            lower,
            upper,
            k_max,
        })
    }

    /// Uniform cells: `cells_lower` partitioning `(k_min, center)` and
    /// `cells_upper` partitioning `(center, k_max)`.
    pub fn uniform(
        center: f64,
        k_min: f64,
        k_max: f64,
        cells_lower: usize,
        cells_upper: usize,
    ) -> Result<Self> {
        if !(k_min.is_finite() && k_min >= 0.0 && k_min < center) {
            return Err(Error::InvalidGrid(format!(
                "K_min must satisfy 0 <= K_min < center, got {k_min}"
            )));
        }
        if !(k_max.is_finite() && k_max > center) {
            return Err(Error::InvalidGrid(format!(
                "K_max must exceed the center, got {k_max}"
            )));
        }
        Self::new(
            center,
            uniform_cells(k_min, center, cells_lower),
            uniform_cells(center, k_max, cells_upper),
            k_max,
        )
    }

    /// Uniform grid with cutoffs at `center / 100` and `10 * center`.
    pub fn uniform_default(center: f64, cells_per_side: usize) -> Result<Self> {
        Self::uniform(
            center,
            center * DEFAULT_KMIN_FRACTION,
            center * DEFAULT_KMAX_MULTIPLE,
            cells_per_side,
            cells_per_side,
        )
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn truncation_k_max(&self) -> f64 {
        self.k_max
    }

    pub fn lower_cells(&self) -> &[Cell] {
        &self.lower
    }

    pub fn upper_cells(&self) -> &[Cell] {
        &self.upper
    }

    pub fn lower_strikes(&self) -> impl Iterator<Item = f64> + '_ {
        self.lower.iter().map(|c| c.strike)
    }

    pub fn upper_strikes(&self) -> impl Iterator<Item = f64> + '_ {
        self.upper.iter().map(|c| c.strike)
    }
}

fn uniform_cells(from: f64, to: f64, n: usize) -> Vec<Cell> {
    let width = (to - from) / n as f64;
    (0..n)
        .map(|i| Cell {
            strike: from + (i as f64 + 0.5) * width,
            width,
        })
        .collect()
}

/// Bond + ATM pair + option strip approximating a payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationPortfolio {
    /// Units of the unit discount bond, `f(m)`.
    pub bond_notional: f64,
    /// Expansion point `m`.
    pub atm_strike: f64,
    /// `f'(m)` calls struck at `m`.
    pub atm_call_qty: f64,
    /// `-f'(m)` puts struck at `m`.
    pub atm_put_qty: f64,
    /// `(strike, quantity)`, strikes ascending and below `m`.
    pub put_legs: Vec<(f64, f64)>,
    /// `(strike, quantity)`, strikes ascending and above `m`.
    pub call_legs: Vec<(f64, f64)>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

/// Builds the midpoint-rule replication portfolio of `payoff` on `grid`.
pub fn build_portfolio<F: SmoothPayoff + ?Sized>(
    payoff: &F,
    grid: &StrikeGrid,
) -> Result<ReplicationPortfolio> {
    let m = grid.center();
    self_check(payoff, &self_check_probes(grid))?;

    let mut warnings = Vec::new();
    if grid.lower.is_empty() && payoff.curvature_at(m / 2.0) != 0.0 {
        warnings.push(format!(
            "no put strikes below {m} although the payoff has curvature there"
        ));
    }
    if grid.upper.is_empty() && payoff.curvature_at(2.0 * m) != 0.0 {
        warnings.push(format!(
            "no call strikes above {m} although the payoff has curvature there"
        ));
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let legs = |cells: &[Cell]| -> Result<Vec<(f64, f64)>> {
        cells
            .iter()
            .map(|c| {
                let q = payoff.curvature_at(c.strike) * c.width;
                if q.is_finite() {
                    Ok((c.strike, q))
                } else {
                    Err(Error::PayoffSelfCheck {
                        label: payoff.description(),
                        price: c.strike,
                        detail: format!("non-finite curvature {q}"),
                    })
                }
            })
            .collect()
    };

    let slope = payoff.slope_at(m);
    Ok(ReplicationPortfolio {
        bond_notional: payoff.value_at(m),
        atm_strike: m,
        atm_call_qty: slope,
        atm_put_qty: 0.0 - slope,
        put_legs: legs(&grid.lower)?,
        call_legs: legs(&grid.upper)?,
        warnings,
    })
}

fn self_check_probes(grid: &StrikeGrid) -> Vec<f64> {
    const PER_SIDE: usize = 16;
    let pick = |cells: &[Cell]| -> Vec<f64> {
        if cells.is_empty() {
            return Vec::new();
        }
        let step = (cells.len() / PER_SIDE).max(1);
        let mut v: Vec<f64> = cells.iter().step_by(step).map(|c| c.strike).collect();
        v.push(cells[cells.len() - 1].strike);
        v
    };
    let mut probes = pick(&grid.lower);
    probes.push(grid.center);
    probes.extend(pick(&grid.upper));
    probes
}

impl ReplicationPortfolio {
    /// Expiry payoff of the portfolio at price `p_t`.
    pub fn payoff(&self, p_t: Price) -> f64 {
        let p = p_t.value();
        let m = self.atm_strike;
        let mut v = self.bond_notional
            + self.atm_call_qty * (p - m).max(0.0)
            + self.atm_put_qty * (m - p).max(0.0);
        // puts only pay for K > p, calls only for K < p
        let first_put = self.put_legs.partition_point(|&(k, _)| k <= p);
        for &(k, q) in &self.put_legs[first_put..] {
            v += q * (k - p);
        }
        let calls_end = self.call_legs.partition_point(|&(k, _)| k < p);
        for &(k, q) in &self.call_legs[..calls_end] {
            v += q * (p - k);
        }
        v
    }

    /// Time-0 value given a bond price and option quotes.
    ///
    /// Zero-quantity legs are not quoted. Missing quotes are collected across
    /// all legs and reported together.
    pub fn present_value<Q: OptionQuotes + ?Sized>(
        &self,
        bond_price: f64,
        quotes: &Q,
    ) -> Result<f64> {
        if !(bond_price.is_finite() && bond_price >= 0.0) {
            return Err(Error::Negative {
                name: "bond_price",
                value: bond_price,
            });
        }
        let mut missing = Vec::new();
        let mut quote = |kind: OptionKind, strike: f64, qty: f64| -> Result<f64> {
            if qty == 0.0 {
                return Ok(0.0);
            }
            match quotes.quote(kind, strike) {
                Ok(v) if v.is_finite() && v >= 0.0 => Ok(qty * v),
                Ok(v) => Err(Error::BadQuote {
                    kind,
                    strike,
                    value: v,
                }),
                Err(Error::MissingQuotes(m)) => {
                    missing.extend(m);
                    Ok(0.0)
                }
                Err(e) => Err(e),
            }
        };
        let m = self.atm_strike;
        let mut v = self.bond_notional * bond_price
            + quote(OptionKind::Call, m, self.atm_call_qty)?
            + quote(OptionKind::Put, m, self.atm_put_qty)?;
        for &(k, q) in &self.put_legs {
            v += quote(OptionKind::Put, k, q)?;
        }
        for &(k, q) in &self.call_legs {
            v += quote(OptionKind::Call, k, q)?;
        }
        if missing.is_empty() {
            Ok(v)
        } else {
            Err(Error::MissingQuotes(missing))
        }
    }

    /// All non-zero legs including the ATM pair, as `(kind, strike, qty)`.
    pub fn option_legs(&self) -> impl Iterator<Item = (OptionKind, f64, f64)> + '_ {
        let atm = [
            (OptionKind::Call, self.atm_strike, self.atm_call_qty),
            (OptionKind::Put, self.atm_strike, self.atm_put_qty),
        ];
        atm.into_iter()
            .chain(self.put_legs.iter().map(|&(k, q)| (OptionKind::Put, k, q)))
            .chain(
                self.call_legs
                    .iter()
                    .map(|&(k, q)| (OptionKind::Call, k, q)),
            )
            .filter(|&(_, _, q)| q != 0.0)
    }
}

/// Worst absolute gap between portfolio and payoff over a probe set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationFit {
    pub max_abs_error: f64,
    /// First probe (in input order) attaining the maximum.
    pub argmax_price: f64,
}

pub fn replication_error<F: SmoothPayoff + ?Sized>(
    port: &ReplicationPortfolio,
    payoff: &F,
    probe_prices: &[f64],
) -> Result<ReplicationFit> {
    if probe_prices.is_empty() {
        return Err(Error::Empty("probe price list is empty"));
    }
    let mut best = ReplicationFit {
        max_abs_error: f64::NEG_INFINITY,
        argmax_price: f64::NAN,
    };
    for &p in probe_prices {
        let err = (port.payoff(Price::new(p)?) - payoff.value_at(p)).abs();
        if err > best.max_abs_error {
            best = ReplicationFit {
                max_abs_error: err,
                argmax_price: p,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::{BlackScholes, MarketParams, QuoteFns, QuoteTable};

    fn px(v: f64) -> Price {
        Price::new(v).unwrap()
    }

    fn il_payoff() -> ImpermanentLoss {
        ImpermanentLoss(PoolPosition::from_capital(2000.0, 100.0).unwrap())
    }

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn quadratic_legs_are_twice_cell_width() {
        let grid = StrikeGrid::uniform(100.0, 0.0, 1000.0, 2000, 2000).unwrap();
        let port = build_portfolio(&Quadratic { center: 100.0 }, &grid).unwrap();
        assert_eq!(port.bond_notional, 0.0);
        assert_eq!(port.atm_call_qty, 0.0);
        assert_eq!(port.atm_put_qty, 0.0);
        assert!(port.put_legs.iter().all(|&(_, q)| q == 2.0 * 0.05));
        assert!(port.call_legs.iter().all(|&(_, q)| q == 2.0 * 0.45));
        // ∫_100^150 2 (150 - K) dK = 2500
        assert!((port.payoff(px(150.0)) - 2500.0).abs() <= 0.5);
    }

    #[test]
    fn constant_payoff_is_a_bond() {
        let grid = StrikeGrid::uniform_default(100.0, 50).unwrap();
        let one = Affine {
            intercept: 1.0,
            slope: 0.0,
        };
        let port = build_portfolio(&one, &grid).unwrap();
        assert_eq!(port.bond_notional, 1.0);
        assert_eq!(port.atm_call_qty, 0.0);
        assert_eq!(port.atm_put_qty, 0.0);
        assert!(port
            .put_legs
            .iter()
            .chain(&port.call_legs)
            .all(|&(_, q)| q == 0.0));
        let fit = replication_error(&port, &one, &linspace(0.5, 5000.0, 101)).unwrap();
        assert_eq!(fit.max_abs_error, 0.0);
        let quotes = QuoteTable::default();
        assert_eq!(port.present_value(0.95, &quotes).unwrap(), 0.95);
    }

    #[test]
    fn il_portfolio_is_all_short_options() {
        let grid = StrikeGrid::uniform(100.0, 10.0, 1000.0, 2000, 2000).unwrap();
        let port = build_portfolio(&il_payoff(), &grid).unwrap();
        assert_eq!(port.bond_notional, 0.0);
        assert_eq!(port.atm_call_qty, 0.0);
        assert_eq!(port.atm_put_qty, 0.0);
        assert!(port
            .put_legs
            .iter()
            .chain(&port.call_legs)
            .all(|&(_, q)| q < 0.0));
        assert!((port.payoff(px(400.0)) + 1000.0).abs() <= 1.0);
        // at m only the put strip below pays nothing and calls pay nothing
        assert_eq!(port.payoff(px(100.0)), 0.0);
    }

    #[test]
    fn hedge_portfolio_is_all_long_options() {
        let grid = StrikeGrid::uniform(100.0, 10.0, 1000.0, 500, 500).unwrap();
        let port = build_portfolio(&Negated(il_payoff()), &grid).unwrap();
        assert!(port
            .put_legs
            .iter()
            .chain(&port.call_legs)
            .all(|&(_, q)| q > 0.0));
    }

    #[test]
    fn affine_payoffs_replicate_exactly() {
        let grid = StrikeGrid::uniform_default(100.0, 64).unwrap();
        let f = Affine {
            intercept: 3.0,
            slope: 2.0,
        };
        let port = build_portfolio(&f, &grid).unwrap();
        assert!(port
            .put_legs
            .iter()
            .chain(&port.call_legs)
            .all(|&(_, q)| q == 0.0));
        for p in [1.0, 50.0, 100.0, 250.0, 4096.0] {
            assert_eq!(port.payoff(px(p)), f.value_at(p));
        }
    }

    #[test]
    fn intrinsic_pricer_reproduces_payoff_at_spot() {
        let grid = StrikeGrid::uniform(100.0, 10.0, 1000.0, 300, 300).unwrap();
        let port = build_portfolio(&il_payoff(), &grid).unwrap();
        for spot in [20.0, 80.0, 100.0, 170.0, 900.0] {
            let quotes = QuoteFns {
                call: |k: f64| (spot - k).max(0.0),
                put: |k: f64| (k - spot).max(0.0),
            };
            assert_eq!(
                port.present_value(1.0, &quotes).unwrap(),
                port.payoff(px(spot))
            );
        }
    }

    #[test]
    fn linear_payoff_prices_to_spot() {
        let grid = StrikeGrid::uniform_default(100.0, 200).unwrap();
        let f = Affine {
            intercept: 0.0,
            slope: 1.0,
        };
        let port = build_portfolio(&f, &grid).unwrap();
        let bs = BlackScholes::new(MarketParams::new(100.0, 0.0, 0.6, 1.0).unwrap());
        let pv = port.present_value(bs.discount_bond(), &bs).unwrap();
        assert!((pv - 100.0).abs() < 1e-6, "{pv}");
    }

    #[test]
    fn zero_vol_pricer_values_quadratic_at_forward() {
        let grid = StrikeGrid::uniform(100.0, 0.0, 1000.0, 2000, 2000).unwrap();
        let f = Quadratic { center: 100.0 };
        let port = build_portfolio(&f, &grid).unwrap();
        let bs = BlackScholes::new(MarketParams::new(120.0, 0.05, 0.0, 1.0).unwrap());
        let b = bs.discount_bond();
        let fwd = bs.market().forward();
        let pv = port.present_value(b, &bs).unwrap();
        assert!(
            (pv - b * f.value_at(fwd)).abs() <= 0.5 * b,
            "{pv} vs {}",
            b * f.value_at(fwd)
        );
    }

    #[test]
    fn missing_quotes_are_collected() {
        let grid = StrikeGrid::uniform(100.0, 50.0, 200.0, 2, 2).unwrap();
        let port = build_portfolio(&il_payoff(), &grid).unwrap();
        let table = QuoteTable::from_csv("kind,strike,premium\nput,62.5,1\n".as_bytes()).unwrap();
        match port.present_value(1.0, &table).unwrap_err() {
            Error::MissingQuotes(m) => assert_eq!(
                m,
                vec![
                    (OptionKind::Put, 87.5),
                    (OptionKind::Call, 125.0),
                    (OptionKind::Call, 175.0)
                ]
            ),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn negative_quotes_are_rejected() {
        let grid = StrikeGrid::uniform(100.0, 50.0, 200.0, 2, 2).unwrap();
        let port = build_portfolio(&il_payoff(), &grid).unwrap();
        let quotes = QuoteFns {
            call: |_k: f64| -1.0,
            put: |_k: f64| 1.0,
        };
        assert!(matches!(
            port.present_value(1.0, &quotes),
            Err(Error::BadQuote { .. })
        ));
        let nan = QuoteFns {
            call: |_k: f64| f64::NAN,
            put: |_k: f64| 1.0,
        };
        assert!(port.present_value(1.0, &nan).is_err());
    }

    #[test]
    fn error_grows_beyond_truncation() {
        let grid = StrikeGrid::uniform(100.0, 10.0, 1000.0, 1000, 1000).unwrap();
        let il = il_payoff();
        let port = build_portfolio(&il, &grid).unwrap();
        let errs: Vec<f64> = [1000.0, 1500.0, 2000.0, 3000.0]
            .iter()
            .map(|&p| replication_error(&port, &il, &[p]).unwrap().max_abs_error)
            .collect();
        assert!(errs.windows(2).all(|w| w[1] > w[0]), "{errs:?}");
        let low: Vec<f64> = [10.0, 5.0, 2.0]
            .iter()
            .map(|&p| replication_error(&port, &il, &[p]).unwrap().max_abs_error)
            .collect();
        assert!(low.windows(2).all(|w| w[1] > w[0]), "{low:?}");
    }

    #[test]
    fn quadratic_error_bound() {
        let grid = StrikeGrid::uniform(100.0, 0.0, 1000.0, 2000, 2000).unwrap();
        let f = Quadratic { center: 100.0 };
        let port = build_portfolio(&f, &grid).unwrap();
        let fit = replication_error(&port, &f, &linspace(50.0, 200.0, 3001)).unwrap();
        assert!(fit.max_abs_error <= 0.5, "{fit:?}");
    }

    #[test]
    fn replication_error_rejects_empty_and_bad_probes() {
        let grid = StrikeGrid::uniform_default(100.0, 4).unwrap();
        let port = build_portfolio(&il_payoff(), &grid).unwrap();
        assert!(replication_error(&port, &il_payoff(), &[]).is_err());
        assert!(replication_error(&port, &il_payoff(), &[0.0]).is_err());
    }

    #[test]
    fn self_check_catches_wrong_derivatives() {
        let bad = FnPayoff {
            value: Box::new(|p| p * p),
            slope: Box::new(|p| 2.0 * p),
            curvature: Box::new(|_| 3.0),
            label: "wrong curvature".into(),
        };
        let grid = StrikeGrid::uniform_default(100.0, 10).unwrap();
        assert!(matches!(
            build_portfolio(&bad, &grid),
            Err(Error::PayoffSelfCheck { .. })
        ));
        assert!(self_check(&il_payoff(), &[1.0, 100.0, 1e4]).is_ok());
        assert!(self_check(&Quadratic { center: 100.0 }, &[1.0, 100.0, 1e4]).is_ok());
    }

    #[test]
    fn empty_side_warns() {
        let grid = StrikeGrid::uniform(100.0, 10.0, 1000.0, 0, 10).unwrap();
        let port = build_portfolio(&il_payoff(), &grid).unwrap();
        assert_eq!(port.warnings.len(), 1);
        let port = build_portfolio(
            &Affine {
                intercept: 0.0,
                slope: 1.0,
            },
            &grid,
        )
        .unwrap();
        assert!(port.warnings.is_empty());
    }

    #[test]
    fn grid_validation() {
        let c = |strike, width| Cell { strike, width };
        assert!(StrikeGrid::new(100.0, vec![c(50.0, 1.0), c(40.0, 1.0)], vec![], 200.0).is_err());
        assert!(StrikeGrid::new(100.0, vec![c(100.0, 1.0)], vec![], 200.0).is_err());
        assert!(StrikeGrid::new(100.0, vec![], vec![c(100.0, 1.0)], 200.0).is_err());
        assert!(StrikeGrid::new(100.0, vec![], vec![c(300.0, 1.0)], 200.0).is_err());
        assert!(StrikeGrid::new(100.0, vec![c(-1.0, 1.0)], vec![], 200.0).is_err());
        assert!(StrikeGrid::new(100.0, vec![c(1.0, 0.0)], vec![], 200.0).is_err());
        assert!(StrikeGrid::uniform(100.0, 100.0, 200.0, 1, 1).is_err());
        assert!(StrikeGrid::uniform(100.0, 10.0, 100.0, 1, 1).is_err());
        let g = StrikeGrid::uniform(100.0, 10.0, 1000.0, 3, 3).unwrap();
        assert_eq!(
            g.lower_strikes().collect::<Vec<_>>(),
            vec![25.0, 55.0, 85.0]
        );
        assert_eq!(
            g.upper_strikes().collect::<Vec<_>>(),
            vec![250.0, 550.0, 850.0]
        );
    }

    #[test]
    fn json_shape() {
        let grid = StrikeGrid::uniform(100.0, 50.0, 200.0, 1, 1).unwrap();
        let port = build_portfolio(&Quadratic { center: 100.0 }, &grid).unwrap();
        let v: serde_json::Value = serde_json::to_value(&port).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        assert_eq!(
            keys,
            vec![
                "atm_call_qty",
                "atm_put_qty",
                "atm_strike",
                "bond_notional",
                "call_legs",
                "put_legs"
            ]
        );
        assert_eq!(v["put_legs"], serde_json::json!([[75.0, 100.0]]));
        let back: ReplicationPortfolio = serde_json::from_value(v).unwrap();
        assert_eq!(back, port);
    }
}
