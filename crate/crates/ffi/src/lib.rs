//! C ABI for `ilhedge`.
//!
//! Objects cross the boundary as opaque handles (`IlhPool`, `IlhHedge`,
//! `IlhPortfolio`) created by `*_new`/`*_build` functions and released with the
//! matching `*_free`. Every fallible call returns an [`IlhStatus`]; results
//! are written through out-pointers, and on failure a message is available
//! from [`ilh_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ilhedge::hedging::{self, HedgeBand, HedgedPosition, Strangle, StrangleSolution};
use ilhedge::pricing::{BlackScholes, MarketParams};
use ilhedge::replication::{self, ImpermanentLoss, Negated, ReplicationPortfolio, StrikeGrid};
use ilhedge::{Error, PoolPosition, Price};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BandExcludesEntry = 3,
    StrikeOrdering = 4,
    MissingQuote = 5,
    Internal = 6,
}

/// Opaque pool position.
pub struct IlhPool(PoolPosition);

/// Opaque pool + strangle + pool return rate.
pub struct IlhHedge(HedgedPosition);

/// Opaque replication portfolio.
pub struct IlhPortfolio(ReplicationPortfolio);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlhStrangleParams {
    pub put_strike: f64,
    pub call_strike: f64,
    pub put_qty: f64,
    pub call_qty: f64,
    pub put_premium: f64,
    pub call_premium: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlhMarketParams {
    pub spot: f64,
    pub rate: f64,
    pub volatility: f64,
    pub expiry: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlhCoverageReport {
    pub put_qty_bound: f64,
    pub call_qty_bound: f64,
    pub budget_gap: f64,
    pub required_pool_return: f64,
    pub put_quantity_holds: bool,
    pub budget_holds: bool,
    pub call_quantity_holds: bool,
    pub grid_min_pnl: f64,
    pub grid_argmin: f64,
    pub covered: bool,
}

/// Which payoff [`ilh_portfolio_build`] replicates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlhPayoff {
    ImpermanentLoss = 0,
    NegatedImpermanentLoss = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> IlhStatus {
    match e {
        Error::BandExcludesEntry { .. } => IlhStatus::BandExcludesEntry,
        Error::StrikeOrdering { .. } => IlhStatus::StrikeOrdering,
        Error::MissingQuotes(_) => IlhStatus::MissingQuote,
        _ => IlhStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F>(f: F) -> IlhStatus
where
    F: FnOnce() -> Result<(), FfiError>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IlhStatus::Ok,
        Ok(Err(FfiError::Null(what))) => {
            set_last_error(format!("null pointer passed for `{what}`"));
            IlhStatus::NullPointer
        }
        Ok(Err(FfiError::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            IlhStatus::Internal
        }
    }
}

enum FfiError {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for FfiError {
    fn from(e: Error) -> Self {
        FfiError::Lib(e)
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, FfiError> {
    p.as_ref().ok_or(FfiError::Null(what))
}

unsafe fn write<T>(out: *mut T, what: &'static str, value: T) -> Result<(), FfiError> {
    if out.is_null() {
        return Err(FfiError::Null(what));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ilh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from an `ilhedge` function returning an owned string and
/// must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ilh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------- pool

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ilh_pool_from_capital(
    capital: f64,
    entry_price: f64,
    out: *mut *mut IlhPool,
) -> IlhStatus {
    guard(|| {
        let pool = PoolPosition::from_capital(capital, entry_price)?;
        write(out, "out", Box::into_raw(Box::new(IlhPool(pool))))
    })
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ilh_pool_from_reserves(
    risky_amount: f64,
    numeraire_amount: f64,
    out: *mut *mut IlhPool,
) -> IlhStatus {
    guard(|| {
        let pool = PoolPosition::from_reserves(risky_amount, numeraire_amount)?;
        write(out, "out", Box::into_raw(Box::new(IlhPool(pool))))
    })
}

/// # Safety
/// `pool` must be NULL or a handle from `ilh_pool_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ilh_pool_free(pool: *mut IlhPool) {
    if !pool.is_null() {
        drop(Box::from_raw(pool));
    }
}

/// # Safety
/// `pool` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_pool_capital(pool: *const IlhPool, out: *mut f64) -> IlhStatus {
    guard(|| write(out, "out", deref(pool, "pool")?.0.capital()))
}

/// # Safety
/// `pool` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_pool_entry_price(pool: *const IlhPool, out: *mut f64) -> IlhStatus {
    guard(|| write(out, "out", deref(pool, "pool")?.0.entry_price()))
}

unsafe fn pool_eval(
    pool: *const IlhPool,
    price: f64,
    out: *mut f64,
    f: fn(&PoolPosition, Price) -> f64,
) -> IlhStatus {
    guard(|| {
        let pool = deref(pool, "pool")?;
        let p = Price::new(price)?;
        write(out, "out", f(&pool.0, p))
    })
}

/// # Safety
/// `pool` must be a live handle; `out_risky` and `out_numeraire` writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_pool_reserves_at_price(
    pool: *const IlhPool,
    price: f64,
    out_risky: *mut f64,
    out_numeraire: *mut f64,
) -> IlhStatus {
    guard(|| {
        let pool = deref(pool, "pool")?;
        let (x, y) = pool.0.reserves_at_price(Price::new(price)?);
        write(out_risky, "out_risky", x)?;
        write(out_numeraire, "out_numeraire", y)
    })
}

/// # Safety
/// `pool` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_pool_value_pool(
    pool: *const IlhPool,
    price: f64,
    out: *mut f64,
) -> IlhStatus {
    pool_eval(pool, price, out, PoolPosition::value_pool)
}

/// # Safety
/// `pool` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_pool_value_hold(
    pool: *const IlhPool,
    price: f64,
    out: *mut f64,
) -> IlhStatus {
    pool_eval(pool, price, out, PoolPosition::value_hold)
}

/// # Safety
/// `pool` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_pool_il(pool: *const IlhPool, price: f64, out: *mut f64) -> IlhStatus {
    pool_eval(pool, price, out, PoolPosition::il)
}

/// # Safety
/// `pool` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_pool_il_slope(
    pool: *const IlhPool,
    price: f64,
    out: *mut f64,
) -> IlhStatus {
    pool_eval(pool, price, out, PoolPosition::il_slope)
}

/// # Safety
/// `pool` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_pool_il_curvature(
    pool: *const IlhPool,
    price: f64,
    out: *mut f64,
) -> IlhStatus {
    pool_eval(pool, price, out, PoolPosition::il_curvature)
}

// ---------------------------------------------------------------- pricing

fn market(m: &IlhMarketParams) -> Result<BlackScholes, Error> {
    MarketParams::new(m.spot, m.rate, m.volatility, m.expiry).map(BlackScholes::new)
}

/// # Safety
/// `market` must point to a valid struct; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_bs_call(
    market_params: *const IlhMarketParams,
    strike: f64,
    out: *mut f64,
) -> IlhStatus {
    guard(|| {
        let m = market(deref(market_params, "market_params")?)?;
        write(out, "out", m.call_price(strike)?)
    })
}

/// # Safety
/// `market` must point to a valid struct; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_bs_put(
    market_params: *const IlhMarketParams,
    strike: f64,
    out: *mut f64,
) -> IlhStatus {
    guard(|| {
        let m = market(deref(market_params, "market_params")?)?;
        write(out, "out", m.put_price(strike)?)
    })
}

/// # Safety
/// `market` must point to a valid struct; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_discount_bond(
    market_params: *const IlhMarketParams,
    out: *mut f64,
) -> IlhStatus {
    guard(|| {
        let m = market(deref(market_params, "market_params")?)?;
        write(out, "out", m.discount_bond())
    })
}

// ---------------------------------------------------------------- hedging

fn strangle(p: &IlhStrangleParams) -> Result<Strangle, Error> {
    Strangle::new(
        p.put_strike,
        p.call_strike,
        p.put_qty,
        p.call_qty,
        p.put_premium,
        p.call_premium,
    )
}

fn strangle_params(s: &Strangle) -> IlhStrangleParams {
    IlhStrangleParams {
        put_strike: s.put_strike,
        call_strike: s.call_strike,
        put_qty: s.put_qty,
        call_qty: s.call_qty,
        put_premium: s.put_premium,
        call_premium: s.call_premium,
    }
}

/// Minimal `(q_p, q_c)` for the band `[lower, upper]`.
///
/// # Safety
/// `pool` must be a live handle; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_quantity_bounds(
    pool: *const IlhPool,
    lower: f64,
    upper: f64,
    out_put_qty: *mut f64,
    out_call_qty: *mut f64,
) -> IlhStatus {
    guard(|| {
        let pool = deref(pool, "pool")?;
        let band = HedgeBand::new(lower, upper)?;
        let (qp, qc) = hedging::proposition_quantity_bounds(&pool.0, &band)?;
        write(out_put_qty, "out_put_qty", qp)?;
        write(out_call_qty, "out_call_qty", qc)
    })
}

/// # Safety
/// `pool` must be a live handle; `strangle` a valid struct; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_required_pool_return(
    pool: *const IlhPool,
    strangle_params: *const IlhStrangleParams,
    out: *mut f64,
) -> IlhStatus {
    guard(|| {
        let pool = deref(pool, "pool")?;
        let s = strangle(deref(strangle_params, "strangle_params")?)?;
        write(out, "out", hedging::required_pool_return(&pool.0, &s)?)
    })
}

/// Minimal strangle with strikes at the band edges, priced by Black–Scholes.
/// `out_feasible` reports whether `pool_return_rate` funds it.
///
/// # Safety
/// `pool` must be a live handle; `market_params` valid; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_solve_min_strangle(
    pool: *const IlhPool,
    lower: f64,
    upper: f64,
    market_params: *const IlhMarketParams,
    pool_return_rate: f64,
    out_strangle: *mut IlhStrangleParams,
    out_feasible: *mut bool,
    out_required_return: *mut f64,
) -> IlhStatus {
    guard(|| {
        let pool = deref(pool, "pool")?;
        let m = market(deref(market_params, "market_params")?)?;
        let band = HedgeBand::new(lower, upper)?;
        let sol = hedging::solve_min_strangle(&pool.0, &band, &m, pool_return_rate)?;
        write(
            out_strangle,
            "out_strangle",
            strangle_params(sol.strangle()),
        )?;
        write(
            out_feasible,
            "out_feasible",
            matches!(sol, StrangleSolution::Feasible { .. }),
        )?;
        write(
            out_required_return,
            "out_required_return",
            sol.required_pool_return(),
        )
    })
}

/// # Safety
/// `pool` must be a live handle (it is copied); `strangle_params` valid;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_hedge_new(
    pool: *const IlhPool,
    strangle_params: *const IlhStrangleParams,
    pool_return_rate: f64,
    out: *mut *mut IlhHedge,
) -> IlhStatus {
    guard(|| {
        let pool = deref(pool, "pool")?;
        let s = strangle(deref(strangle_params, "strangle_params")?)?;
        let hp = HedgedPosition::new(pool.0, s, pool_return_rate)?;
        write(out, "out", Box::into_raw(Box::new(IlhHedge(hp))))
    })
}

/// # Safety
/// `hedge` must be NULL or a handle from `ilh_hedge_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ilh_hedge_free(hedge: *mut IlhHedge) {
    if !hedge.is_null() {
        drop(Box::from_raw(hedge));
    }
}

/// Total PnL at expiry price `price`.
///
/// # Safety
/// `hedge` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_hedge_total_pnl(
    hedge: *const IlhHedge,
    price: f64,
    out: *mut f64,
) -> IlhStatus {
    guard(|| {
        let h = deref(hedge, "hedge")?;
        write(out, "out", h.0.total_pnl(Price::new(price)?))
    })
}

/// Evaluates the three inequalities and the grid check on `n_points` points
/// (0 selects the default grid).
///
/// # Safety
/// `hedge` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_hedge_check(
    hedge: *const IlhHedge,
    lower: f64,
    upper: f64,
    n_points: usize,
    out: *mut IlhCoverageReport,
) -> IlhStatus {
    guard(|| {
        let h = deref(hedge, "hedge")?;
        let band = HedgeBand::new(lower, upper)?;
        let n = if n_points == 0 {
            hedging::DEFAULT_GRID_POINTS
        } else {
            n_points
        };
        let r = hedging::check_proposition_with_grid(&h.0, &band, n)?;
        write(
            out,
            "out",
            IlhCoverageReport {
                put_qty_bound: r.put_qty_bound,
                call_qty_bound: r.call_qty_bound,
                budget_gap: r.budget_gap,
                required_pool_return: r.required_pool_return,
                put_quantity_holds: r.inequalities_hold.put_quantity,
                budget_holds: r.inequalities_hold.budget,
                call_quantity_holds: r.inequalities_hold.call_quantity,
                grid_min_pnl: r.grid_min_pnl,
                grid_argmin: r.grid_argmin,
                covered: r.covered,
            },
        )
    })
}

// ---------------------------------------------------------------- replication

/// Replicates the pool's IL (or its negation) on a uniform grid with
/// `cells_per_side` cells on `(k_min, center)` and `(center, k_max)`.
///
/// # Safety
/// `pool` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_portfolio_build(
    pool: *const IlhPool,
    payoff: IlhPayoff,
    center: f64,
    k_min: f64,
    k_max: f64,
    cells_per_side: usize,
    out: *mut *mut IlhPortfolio,
) -> IlhStatus {
    guard(|| {
        let pool = deref(pool, "pool")?;
        let grid = StrikeGrid::uniform(center, k_min, k_max, cells_per_side, cells_per_side)?;
        let il = ImpermanentLoss(pool.0);
        let port = match payoff {
            IlhPayoff::ImpermanentLoss => replication::build_portfolio(&il, &grid)?,
            IlhPayoff::NegatedImpermanentLoss => replication::build_portfolio(&Negated(il), &grid)?,
        };
        write(out, "out", Box::into_raw(Box::new(IlhPortfolio(port))))
    })
}

/// # Safety
/// `portfolio` must be NULL or a handle from `ilh_portfolio_build` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ilh_portfolio_free(portfolio: *mut IlhPortfolio) {
    if !portfolio.is_null() {
        drop(Box::from_raw(portfolio));
    }
}

/// # Safety
/// `portfolio` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_portfolio_payoff(
    portfolio: *const IlhPortfolio,
    price: f64,
    out: *mut f64,
) -> IlhStatus {
    guard(|| {
        let p = deref(portfolio, "portfolio")?;
        write(out, "out", p.0.payoff(Price::new(price)?))
    })
}

/// Present value under Black–Scholes premiums and the model discount bond.
///
/// # Safety
/// `portfolio` must be a live handle; `market_params` valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_portfolio_present_value(
    portfolio: *const IlhPortfolio,
    market_params: *const IlhMarketParams,
    out: *mut f64,
) -> IlhStatus {
    guard(|| {
        let p = deref(portfolio, "portfolio")?;
        let m = market(deref(market_params, "market_params")?)?;
        write(out, "out", p.0.present_value(m.discount_bond(), &m)?)
    })
}

/// Portfolio as JSON; free the string with `ilh_string_free`.
///
/// # Safety
/// `portfolio` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ilh_portfolio_to_json(
    portfolio: *const IlhPortfolio,
    out: *mut *mut c_char,
) -> IlhStatus {
    guard(|| {
        let p = deref(portfolio, "portfolio")?;
        let json = serde_json::to_string(&p.0).expect("portfolio serialises");
        let c = CString::new(json).expect("JSON has no interior NUL");
        write(out, "out", c.into_raw())
    })
}
