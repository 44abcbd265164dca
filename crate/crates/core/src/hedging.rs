//! Long-strangle hedge of impermanent loss over a price band.
//!
//! A liquidity provider with capital `c` earns `r_p * c` from the pool and
//! buys `q_p` puts struck at `K_p` and `q_c` calls struck at `K_c`, paying
//! `D = q_p d_p + q_c d_c` (netted undiscounted at expiry). The position is
//! covered on `[P_i, P_s]` whenever
//!
//! ```text
//! q_p >= (c/2) (1/sqrt(P_i P_0) - 1/P_0)
//! D - min{IL(K_c), IL(K_p)} <= r_p c
//! q_c >= -(c/2) (1/sqrt(P_s P_0) - 1/P_0)
//! ```
//!
//! with `P_i <= K_p <= P_0 <= K_c <= P_s`. The conditions are sufficient
//! only; [`verify_coverage_grid`] checks coverage directly by brute force.
//!
//! The original statement adds "posiciones Long en calls (si q_c>q_p) ó puts
//! (si q_p>q_c)"; nothing here branches on that comparison.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amm::{PoolPosition, Price};
use crate::error::{non_negative, positive, Error, Result};
use crate::pricing::OptionQuotes;

/// Grid size used by [`check_proposition`].
pub const DEFAULT_GRID_POINTS: usize = 10_001;
/// `covered` allows the grid minimum to dip to `-COVERAGE_TOL * c`.
pub const COVERAGE_TOL: f64 = 1e-9;

/// Protection interval `[P_i, P_s]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HedgeBand {
    lower: f64,
    upper: f64,
}

#[derive(Deserialize)]
struct RawBand {
    lower: f64,
    upper: f64,
}

impl<'de> Deserialize<'de> for HedgeBand {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawBand::deserialize(d)?;
        HedgeBand::new(raw.lower, raw.upper).map_err(serde::de::Error::custom)
    }
}

impl HedgeBand {
    /// `0 < lower <= upper`; a single-point band is allowed.
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        positive("band.lower", lower)?;
        positive("band.upper", upper)?;
        if lower > upper {
            return Err(Error::InvalidBand(format!(
                "lower edge {lower} exceeds upper edge {upper}"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }

    pub fn ensure_contains_entry(&self, pool: &PoolPosition) -> Result<()> {
        if self.contains(pool.entry_price()) {
            Ok(())
        } else {
            Err(Error::BandExcludesEntry {
                lower: self.lower,
                upper: self.upper,
                entry_price: pool.entry_price(),
            })
        }
    }
}

/// Long put at `put_strike` plus long call at `call_strike`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Strangle {
    pub put_strike: f64,
    pub call_strike: f64,
    pub put_qty: f64,
    pub call_qty: f64,
    pub put_premium: f64,
    pub call_premium: f64,
}

#[derive(Deserialize)]
struct RawStrangle {
    put_strike: f64,
    call_strike: f64,
    put_qty: f64,
    call_qty: f64,
    put_premium: f64,
    call_premium: f64,
}

impl<'de> Deserialize<'de> for Strangle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RawStrangle::deserialize(d)?;
        Strangle::new(
            r.put_strike,
            r.call_strike,
            r.put_qty,
            r.call_qty,
            r.put_premium,
            r.call_premium,
        )
        .map_err(serde::de::Error::custom)
    }
}

impl Strangle {
    pub fn new(
        put_strike: f64,
        call_strike: f64,
        put_qty: f64,
        call_qty: f64,
        put_premium: f64,
        call_premium: f64,
    ) -> Result<Self> {
        let s = Self {
            put_strike: positive("put_strike", put_strike)?,
            call_strike: positive("call_strike", call_strike)?,
            put_qty: non_negative("put_qty", put_qty)?,
            call_qty: non_negative("call_qty", call_qty)?,
            put_premium: non_negative("put_premium", put_premium)?,
            call_premium: non_negative("call_premium", call_premium)?,
        };
        if put_strike > call_strike {
            return Err(Error::InvalidStrangle(format!(
                "put strike {put_strike} is above call strike {call_strike}"
            )));
        }
        Ok(s)
    }

    /// `D = q_c d_c + q_p d_p`.
    pub fn total_cost(&self) -> f64 {
        self.call_qty * self.call_premium + self.put_qty * self.put_premium
    }

    /// Expiry payoff before premiums: `q_c (p - K_c)^+ + q_p (K_p - p)^+`.
    pub fn payoff(&self, p_t: Price) -> f64 {
        let p = p_t.value();
        self.call_qty * (p - self.call_strike).max(0.0)
            + self.put_qty * (self.put_strike - p).max(0.0)
    }
}

/// Pool deposit together with its strangle and the pool's period return.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HedgedPosition {
    pub pool: PoolPosition,
    pub strangle: Strangle,
    pub pool_return_rate: f64,
}

impl HedgedPosition {
    pub fn new(pool: PoolPosition, strangle: Strangle, pool_return_rate: f64) -> Result<Self> {
        non_negative("pool_return_rate", pool_return_rate)?;
        Ok(Self {
            pool,
            strangle,
            pool_return_rate,
        })
    }

    /// `r_p c + payoff_str - D + IL(p)`.
    pub fn total_pnl(&self, p_t: Price) -> f64 {
        self.pool_return_rate * self.pool.capital() + self.strangle.payoff(p_t)
            - self.strangle.total_cost()
            + self.pool.il(p_t)
    }
}

/// Minimal `(q_p, q_c)` from the quantity inequalities. Both bounds equal
/// `±IL'` at the band edges.
pub fn proposition_quantity_bounds(pool: &PoolPosition, band: &HedgeBand) -> Result<(f64, f64)> {
    band.ensure_contains_entry(pool)?;
    // (c/2)(1/sqrt(P P_0) - 1/P_0) rewritten as (c/2P_0)(sqrt(P_0) - sqrt(P))/sqrt(P),
    // which avoids cancelling two nearly equal reciprocals
    let p0 = pool.entry_price();
    let scale = pool.capital() / (2.0 * p0);
    let (s0, s_lo, s_hi) = (p0.sqrt(), band.lower().sqrt(), band.upper().sqrt());
    let q_p = scale * (s0 - s_lo) / s_lo;
    let q_c = scale * (s_hi - s0) / s_hi;
    Ok((q_p.max(0.0), q_c.max(0.0)))
}

/// Smallest `r_p` satisfying the budget inequality:
/// `(D - min{IL(K_c), IL(K_p)}) / c`.
pub fn required_pool_return(pool: &PoolPosition, strangle: &Strangle) -> Result<f64> {
    let il_c = pool.il(Price::new(strangle.call_strike)?);
    let il_p = pool.il(Price::new(strangle.put_strike)?);
    Ok((strangle.total_cost() - il_c.min(il_p)) / pool.capital())
}

/// Verdicts for the three inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityVerdicts {
    pub put_quantity: bool,
    pub budget: bool,
    pub call_quantity: bool,
}

impl InequalityVerdicts {
    pub fn all(&self) -> bool {
        self.put_quantity && self.budget && self.call_quantity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub put_qty_bound: f64,
    pub call_qty_bound: f64,
    /// `r_p c - (D - min{IL(K_c), IL(K_p)})`; non-negative iff the budget
    /// inequality holds.
    pub budget_gap: f64,
    pub required_pool_return: f64,
    pub inequalities_hold: InequalityVerdicts,
    pub grid_min_pnl: f64,
    pub grid_argmin: f64,
    pub covered: bool,
}

/// Minimum of the total PnL over a grid and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMinimum {
    pub min_pnl: f64,
    pub argmin: f64,
}

/// Evaluates the three inequalities and brute-forces coverage on
/// [`DEFAULT_GRID_POINTS`] points.
pub fn check_proposition(hp: &HedgedPosition, band: &HedgeBand) -> Result<CoverageReport> {
    check_proposition_with_grid(hp, band, DEFAULT_GRID_POINTS)
}

pub fn check_proposition_with_grid(
    hp: &HedgedPosition,
    band: &HedgeBand,
    n_points: usize,
) -> Result<CoverageReport> {
    let pool = &hp.pool;
    let s = &hp.strangle;
    band.ensure_contains_entry(pool)?;
    let p0 = pool.entry_price();
    if !(band.lower() <= s.put_strike
        && s.put_strike <= p0
        && p0 <= s.call_strike
        && s.call_strike <= band.upper())
    {
        return Err(Error::StrikeOrdering {
            lower: band.lower(),
            put_strike: s.put_strike,
            entry_price: p0,
            call_strike: s.call_strike,
            upper: band.upper(),
        });
    }

    let (q_p_min, q_c_min) = proposition_quantity_bounds(pool, band)?;
    let c = pool.capital();
    let worst_il = pool
        .il(Price::new(s.call_strike)?)
        .min(pool.il(Price::new(s.put_strike)?));
    let budget_need = s.total_cost() - worst_il;
    let budget_have = hp.pool_return_rate * c;
    let required = budget_need / c;
    let verdicts = InequalityVerdicts {
        put_quantity: q_p_min <= s.put_qty,
        // compared per unit of capital, the same form solve_min_strangle uses
        budget: required <= hp.pool_return_rate,
        call_quantity: q_c_min <= s.call_qty,
    };

    let grid = verify_coverage_grid(hp, band, n_points)?;
    Ok(CoverageReport {
        put_qty_bound: q_p_min,
        call_qty_bound: q_c_min,
        budget_gap: budget_have - budget_need,
        required_pool_return: required,
        inequalities_hold: verdicts,
        grid_min_pnl: grid.min_pnl,
        grid_argmin: grid.argmin,
        covered: grid.min_pnl >= -COVERAGE_TOL * c,
    })
}

/// Result of [`solve_min_strangle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum StrangleSolution {
    Feasible {
        strangle: Strangle,
        required_pool_return: f64,
    },
    /// The minimal strangle costs more than the pool return can fund.
    Infeasible {
        strangle: Strangle,
        required_pool_return: f64,
    },
}

impl StrangleSolution {
    pub fn strangle(&self) -> &Strangle {
        match self {
            StrangleSolution::Feasible { strangle, .. }
            | StrangleSolution::Infeasible { strangle, .. } => strangle,
        }
    }

    pub fn required_pool_return(&self) -> f64 {
        match *self {
            StrangleSolution::Feasible {
                required_pool_return,
                ..
            }
            | StrangleSolution::Infeasible {
                required_pool_return,
                ..
            } => required_pool_return,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, StrangleSolution::Feasible { .. })
    }
}

/// Minimal strangle with strikes at the band edges and quantities at the
/// inequality bounds, priced from `quotes`.
pub fn solve_min_strangle<Q: OptionQuotes + ?Sized>(
    pool: &PoolPosition,
    band: &HedgeBand,
    quotes: &Q,
    pool_return_rate: f64,
) -> Result<StrangleSolution> {
    non_negative("pool_return_rate", pool_return_rate)?;
    let (q_p, q_c) = proposition_quantity_bounds(pool, band)?;
    let put_premium = quotes.put(band.lower());
    let call_premium = quotes.call(band.upper());
    let (put_premium, call_premium) = match (put_premium, call_premium) {
        (Ok(p), Ok(c)) => (p, c),
        (Err(Error::MissingQuotes(mut a)), Err(Error::MissingQuotes(b))) => {
            a.extend(b);
            return Err(Error::MissingQuotes(a));
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let strangle = Strangle::new(
        band.lower(),
        band.upper(),
        q_p,
        q_c,
        put_premium,
        call_premium,
    )?;
    let required = required_pool_return(pool, &strangle)?;
    Ok(if required <= pool_return_rate {
        StrangleSolution::Feasible {
            strangle,
            required_pool_return: required,
        }
    } else {
        StrangleSolution::Infeasible {
            strangle,
            required_pool_return: required,
        }
    })
}

/// Prices at which [`verify_coverage_grid`] evaluates the PnL: `n_points`
/// uniform points on the band plus every kink inside it, ascending and
/// deduplicated.
pub fn coverage_grid(hp: &HedgedPosition, band: &HedgeBand, n_points: usize) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(Error::InvalidBand(format!(
            "verification grid needs at least 2 points, got {n_points}"
        )));
    }
    let (lo, hi) = (band.lower(), band.upper());
    let span = hi - lo;
    let last = (n_points - 1) as f64;
    let mut prices: Vec<f64> = (0..n_points)
        .map(|i| {
            if i + 1 == n_points {
                hi
            } else {
                lo + span * (i as f64 / last)
            }
        })
        .collect();
    prices.extend(
        [
            hp.strangle.put_strike,
            hp.strangle.call_strike,
            hp.pool.entry_price(),
        ]
        .into_iter()
        .filter(|&k| band.contains(k)),
    );
    prices.sort_by(f64::total_cmp);
    prices.dedup();
    Ok(prices)
}

/// Brute-force minimum of the total PnL over the band.
///
/// Evaluation runs in parallel; the reduction is sequential so ties resolve
/// to the lowest price regardless of thread count.
pub fn verify_coverage_grid(
    hp: &HedgedPosition,
    band: &HedgeBand,
    n_points: usize,
) -> Result<GridMinimum> {
    let prices = coverage_grid(hp, band, n_points)?;
    let pnl: Vec<f64> = prices
        .par_iter()
        .map(|&p| Price::new(p).map(|p| hp.total_pnl(p)))
        .collect::<Result<_>>()?;
    let mut best = GridMinimum {
        min_pnl: f64::INFINITY,
        argmin: f64::NAN,
    };
    for (&p, &v) in prices.iter().zip(&pnl) {
        if v < best.min_pnl {
            best = GridMinimum {
                min_pnl: v,
                argmin: p,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::QuoteTable;

    fn px(v: f64) -> Price {
        Price::new(v).unwrap()
    }

    fn pool() -> PoolPosition {
        PoolPosition::from_capital(2000.0, 100.0).unwrap()
    }

    fn worked_strangle() -> Strangle {
        Strangle::new(64.0, 156.25, 2.5, 2.0, 2.0, 3.0).unwrap()
    }

    fn worked(r_p: f64) -> HedgedPosition {
        HedgedPosition::new(pool(), worked_strangle(), r_p).unwrap()
    }

    fn band() -> HedgeBand {
        HedgeBand::new(64.0, 156.25).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn strangle_payoff_examples() {
        let s = worked_strangle();
        assert_eq!(s.payoff(px(100.0)), 0.0);
        assert_eq!(s.payoff(px(200.0)), 87.5);
        assert_eq!(s.payoff(px(50.0)), 35.0);
        assert_eq!(s.total_cost(), 11.0);
    }

    #[test]
    fn total_pnl_examples() {
        let hp = worked(0.05);
        assert_eq!(hp.total_pnl(px(100.0)), 89.0);
        assert!(close(hp.total_pnl(px(64.0)), 49.0, 1e-12));
        assert_eq!(hp.total_pnl(px(156.25)), 26.5);
    }

    #[test]
    fn quantity_bound_examples() {
        let (qp, qc) = proposition_quantity_bounds(&pool(), &band()).unwrap();
        assert_eq!((qp, qc), (2.5, 2.0));
        let (qp, qc) =
            proposition_quantity_bounds(&pool(), &HedgeBand::new(25.0, 400.0).unwrap()).unwrap();
        assert!(close(qp, 10.0, 1e-12) && close(qc, 5.0, 1e-12));
        let (qp, qc) =
            proposition_quantity_bounds(&pool(), &HedgeBand::new(100.0, 100.0).unwrap()).unwrap();
        assert_eq!((qp, qc), (0.0, 0.0));
        assert!(matches!(
            proposition_quantity_bounds(&pool(), &HedgeBand::new(110.0, 200.0).unwrap()),
            Err(Error::BandExcludesEntry { .. })
        ));
    }

    #[test]
    fn quantity_bounds_are_edge_slopes() {
        let p = PoolPosition::from_capital(1234.5, 37.0).unwrap();
        for (lo, hi) in [(1.0, 37.0), (20.0, 60.0), (36.9, 37.1), (7.0, 500.0)] {
            let b = HedgeBand::new(lo, hi).unwrap();
            let (qp, qc) = proposition_quantity_bounds(&p, &b).unwrap();
            assert!(close(qp, p.il_slope(px(lo)), 1e-12));
            assert!(close(qc, -p.il_slope(px(hi)), 1e-12));
            let half_c = p.capital() / 2.0;
            let p0 = p.entry_price();
            let literal_p = half_c * (1.0 / (lo * p0).sqrt() - 1.0 / p0);
            let literal_c = -half_c * (1.0 / (hi * p0).sqrt() - 1.0 / p0);
            assert!((qp - literal_p).abs() <= 1e-12 * half_c / p0);
            assert!((qc - literal_c).abs() <= 1e-12 * half_c / p0);
        }
    }

    #[test]
    fn required_return_examples() {
        let r = required_pool_return(&pool(), &worked_strangle()).unwrap();
        assert!(close(r, 0.03675, 1e-12), "{r}");
        let free = Strangle::new(100.0, 100.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(required_pool_return(&pool(), &free).unwrap(), 0.0);
        let mut dear = worked_strangle();
        dear.put_premium *= 2.0;
        dear.call_premium *= 2.0;
        let r2 = required_pool_return(&pool(), &dear).unwrap();
        assert!(close(r2 - r, 11.0 / 2000.0, 1e-12));
    }

    #[test]
    fn check_worked_position() {
        let rep = check_proposition(&worked(0.05), &band()).unwrap();
        assert!(rep.inequalities_hold.all());
        assert!(rep.covered);
        assert_eq!(rep.grid_min_pnl, 26.5);
        assert_eq!(rep.grid_argmin, 156.25);
        assert!(close(rep.required_pool_return, 0.03675, 1e-12));

        let rep = check_proposition(&worked(0.03), &band()).unwrap();
        assert!(rep.inequalities_hold.put_quantity && rep.inequalities_hold.call_quantity);
        assert!(!rep.inequalities_hold.budget);
        assert!(rep.budget_gap < 0.0);
        assert!(close(rep.grid_min_pnl, -13.5, 1e-12));
        assert_eq!(rep.grid_argmin, 156.25);
        assert!(!rep.covered);
    }

    #[test]
    fn sufficiency_is_one_directional() {
        let mut s = worked_strangle();
        s.put_qty = 1.0;
        let hp = HedgedPosition::new(pool(), s, 0.05).unwrap();
        let rep = check_proposition(&hp, &band()).unwrap();
        assert!(!rep.inequalities_hold.put_quantity);
        assert!(rep.covered);
    }

    #[test]
    fn strike_ordering_is_enforced() {
        let s = Strangle::new(110.0, 156.25, 2.5, 2.0, 2.0, 3.0).unwrap();
        let hp = HedgedPosition::new(pool(), s, 0.05).unwrap();
        assert!(matches!(
            check_proposition(&hp, &band()),
            Err(Error::StrikeOrdering { .. })
        ));
        let s = Strangle::new(64.0, 170.0, 2.5, 2.0, 2.0, 3.0).unwrap();
        let hp = HedgedPosition::new(pool(), s, 0.05).unwrap();
        let err = check_proposition(&hp, &band()).unwrap_err();
        assert!(err.to_string().contains("170"));
    }

    #[test]
    fn validation() {
        assert!(Strangle::new(120.0, 100.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(Strangle::new(90.0, 100.0, -1.0, 1.0, 0.0, 0.0).is_err());
        assert!(Strangle::new(90.0, 100.0, 1.0, 1.0, -0.1, 0.0).is_err());
        assert!(HedgeBand::new(2.0, 1.0).is_err());
        assert!(HedgeBand::new(0.0, 1.0).is_err());
        assert!(HedgedPosition::new(pool(), worked_strangle(), -0.01).is_err());
        let b: std::result::Result<HedgeBand, _> = serde_json::from_str(r#"{"lower":5,"upper":1}"#);
        assert!(b.is_err());
    }

    #[test]
    fn solve_examples() {
        let quotes =
            QuoteTable::from_csv("kind,strike,premium\nput,64,2\ncall,156.25,3\n".as_bytes())
                .unwrap();
        let sol = solve_min_strangle(&pool(), &band(), &quotes, 0.05).unwrap();
        assert!(sol.is_feasible());
        let s = sol.strangle();
        assert_eq!((s.put_strike, s.call_strike), (64.0, 156.25));
        assert!(close(s.put_qty, 2.5, 1e-12) && close(s.call_qty, 2.0, 1e-12));
        assert_eq!((s.put_premium, s.call_premium), (2.0, 3.0));
        assert!(close(sol.required_pool_return(), 0.03675, 1e-12));

        let sol = solve_min_strangle(&pool(), &band(), &quotes, 0.01).unwrap();
        assert!(!sol.is_feasible());
        assert!(close(sol.required_pool_return(), 0.03675, 1e-12));

        let missing = solve_min_strangle(
            &pool(),
            &HedgeBand::new(60.0, 200.0).unwrap(),
            &quotes,
            0.05,
        );
        match missing {
            Err(Error::MissingQuotes(m)) => assert_eq!(m.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn solve_degenerate_band() {
        let quotes =
            QuoteTable::from_csv("kind,strike,premium\nput,100,4\ncall,100,4\n".as_bytes())
                .unwrap();
        let b = HedgeBand::new(100.0, 100.0).unwrap();
        let sol = solve_min_strangle(&pool(), &b, &quotes, 0.0).unwrap();
        assert!(sol.is_feasible());
        assert_eq!(sol.strangle().put_qty, 0.0);
        assert_eq!(sol.strangle().call_qty, 0.0);
        assert!(solve_min_strangle(&pool(), &b, &quotes, -0.01).is_err());
    }

    #[test]
    fn grid_examples() {
        let g = verify_coverage_grid(&worked(0.05), &band(), 10_001).unwrap();
        assert_eq!(
            g,
            GridMinimum {
                min_pnl: 26.5,
                argmin: 156.25
            }
        );

        let bare = Strangle::new(64.0, 156.25, 0.0, 0.0, 0.0, 0.0).unwrap();
        let hp = HedgedPosition::new(pool(), bare, 0.0).unwrap();
        let g = verify_coverage_grid(&hp, &band(), 10_001).unwrap();
        assert_eq!(
            g,
            GridMinimum {
                min_pnl: -62.5,
                argmin: 156.25
            }
        );

        let point = HedgeBand::new(100.0, 100.0).unwrap();
        let g = verify_coverage_grid(&worked(0.05), &point, 2).unwrap();
        assert_eq!(
            g,
            GridMinimum {
                min_pnl: 100.0 - 11.0,
                argmin: 100.0
            }
        );

        assert!(verify_coverage_grid(&worked(0.05), &band(), 1).is_err());
    }

    #[test]
    fn grid_includes_kinks() {
        // kinks that a 3-point grid would straddle
        let s = Strangle::new(70.0, 130.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        let hp = HedgedPosition::new(pool(), s, 0.0).unwrap();
        let prices = coverage_grid(&hp, &HedgeBand::new(50.0, 170.0).unwrap(), 3).unwrap();
        assert_eq!(prices, vec![50.0, 70.0, 100.0, 110.0, 130.0, 170.0]);
    }

    #[test]
    fn ties_resolve_to_lowest_price() {
        // flat zero PnL on the band: single point pool... use a zero-capital
        // contribution by evaluating at the entry price only.
        let s = Strangle::new(100.0, 100.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let hp = HedgedPosition::new(pool(), s, 0.0).unwrap();
        let g = verify_coverage_grid(&hp, &HedgeBand::new(100.0, 100.0).unwrap(), 5).unwrap();
        assert_eq!(g.argmin, 100.0);
        // symmetric-in-log losses are not equal in price space, but the
        // reduction must still match a sequential scan exactly
        let b = HedgeBand::new(50.0, 200.0).unwrap();
        let g = verify_coverage_grid(&worked(0.05), &b, 4001).unwrap();
        let prices = coverage_grid(&worked(0.05), &b, 4001).unwrap();
        let seq = prices
            .iter()
            .map(|&p| (worked(0.05).total_pnl(px(p)), p))
            .fold(
                (f64::INFINITY, f64::NAN),
                |acc, x| if x.0 < acc.0 { x } else { acc },
            );
        assert_eq!((g.min_pnl, g.argmin), seq);
    }

    #[test]
    fn report_json_has_all_fields() {
        let rep = check_proposition(&worked(0.05), &band()).unwrap();
        let v = serde_json::to_value(rep).unwrap();
        for k in [
            "put_qty_bound",
            "call_qty_bound",
            "budget_gap",
            "required_pool_return",
            "inequalities_hold",
            "grid_min_pnl",
            "grid_argmin",
            "covered",
        ] {
            assert!(v.get(k).is_some(), "{k}");
        }
        let back: CoverageReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, rep);
    }
}
