#ifndef ILHEDGE_H
#define ILHEDGE_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which payoff [`ilh_portfolio_build`] replicates.
 */
typedef enum IlhPayoff {
  ILH_PAYOFF_IMPERMANENT_LOSS = 0,
  ILH_PAYOFF_NEGATED_IMPERMANENT_LOSS = 1,
} IlhPayoff;

/**
 * Status codes returned by every fallible function.
 */
typedef enum IlhStatus {
  ILH_STATUS_OK = 0,
  ILH_STATUS_NULL_POINTER = 1,
  ILH_STATUS_INVALID_ARGUMENT = 2,
  ILH_STATUS_BAND_EXCLUDES_ENTRY = 3,
  ILH_STATUS_STRIKE_ORDERING = 4,
  ILH_STATUS_MISSING_QUOTE = 5,
  ILH_STATUS_INTERNAL = 6,
} IlhStatus;

/**
 * Opaque pool + strangle + pool return rate.
 */
typedef struct IlhHedge IlhHedge;

/**
 * Opaque pool position.
 */
typedef struct IlhPool IlhPool;

/**
 * Opaque replication portfolio.
 */
typedef struct IlhPortfolio IlhPortfolio;

typedef struct IlhMarketParams {
  double spot;
  double rate;
  double volatility;
  double expiry;
} IlhMarketParams;

typedef struct IlhStrangleParams {
  double put_strike;
  double call_strike;
  double put_qty;
  double call_qty;
  double put_premium;
  double call_premium;
} IlhStrangleParams;

typedef struct IlhCoverageReport {
  double put_qty_bound;
  double call_qty_bound;
  double budget_gap;
  double required_pool_return;
  bool put_quantity_holds;
  bool budget_holds;
  bool call_quantity_holds;
  double grid_min_pnl;
  double grid_argmin;
  bool covered;
} IlhCoverageReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *ilh_last_error_message(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from an `ilhedge` function returning an owned string and
 * must not be freed twice.
 */
void ilh_string_free(char *s);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum IlhStatus ilh_pool_from_capital(double capital, double entry_price, struct IlhPool **out);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum IlhStatus ilh_pool_from_reserves(double risky_amount,
                                      double numeraire_amount,
                                      struct IlhPool **out);

/**
 * # Safety
 * `pool` must be NULL or a handle from `ilh_pool_*` not yet freed.
 */
void ilh_pool_free(struct IlhPool *pool);

/**
 * # Safety
 * `pool` must be a live handle; `out` must be writable.
 */
enum IlhStatus ilh_pool_capital(const struct IlhPool *pool, double *out);

/**
 * # Safety
 * `pool` must be a live handle; `out` must be writable.
 */
enum IlhStatus ilh_pool_entry_price(const struct IlhPool *pool, double *out);

/**
 * # Safety
 * `pool` must be a live handle; `out_risky` and `out_numeraire` writable.
 */
enum IlhStatus ilh_pool_reserves_at_price(const struct IlhPool *pool,
                                          double price,
                                          double *out_risky,
                                          double *out_numeraire);

/**
 * # Safety
 * `pool` must be a live handle; `out` must be writable.
 */
enum IlhStatus ilh_pool_value_pool(const struct IlhPool *pool, double price, double *out);

/**
 * # Safety
 * `pool` must be a live handle; `out` must be writable.
 */
enum IlhStatus ilh_pool_value_hold(const struct IlhPool *pool, double price, double *out);

/**
 * # Safety
 * `pool` must be a live handle; `out` must be writable.
 */
enum IlhStatus ilh_pool_il(const struct IlhPool *pool, double price, double *out);

/**
 * # Safety
 * `pool` must be a live handle; `out` must be writable.
 */
enum IlhStatus ilh_pool_il_slope(const struct IlhPool *pool, double price, double *out);

/**
 * # Safety
 * `pool` must be a live handle; `out` must be writable.
 */
enum IlhStatus ilh_pool_il_curvature(const struct IlhPool *pool, double price, double *out);

/**
 * # Safety
 * `market` must point to a valid struct; `out` must be writable.
 */
enum IlhStatus ilh_bs_call(const struct IlhMarketParams *market_params, double strike, double *out);

/**
 * # Safety
 * `market` must point to a valid struct; `out` must be writable.
 */
enum IlhStatus ilh_bs_put(const struct IlhMarketParams *market_params, double strike, double *out);

/**
 * # Safety
 * `market` must point to a valid struct; `out` must be writable.
 */
enum IlhStatus ilh_discount_bond(const struct IlhMarketParams *market_params, double *out);

/**
 * Minimal `(q_p, q_c)` for the band `[lower, upper]`.
 *
 * # Safety
 * `pool` must be a live handle; out-pointers writable.
 */
enum IlhStatus ilh_quantity_bounds(const struct IlhPool *pool,
                                   double lower,
                                   double upper,
                                   double *out_put_qty,
                                   double *out_call_qty);

/**
 * # Safety
 * `pool` must be a live handle; `strangle` a valid struct; `out` writable.
 */
enum IlhStatus ilh_required_pool_return(const struct IlhPool *pool,
                                        const struct IlhStrangleParams *strangle_params,
                                        double *out);

/**
 * Minimal strangle with strikes at the band edges, priced by Black–Scholes.
 * `out_feasible` reports whether `pool_return_rate` funds it.
 *
 * # Safety
 * `pool` must be a live handle; `market_params` valid; out-pointers writable.
 */
enum IlhStatus ilh_solve_min_strangle(const struct IlhPool *pool,
                                      double lower,
                                      double upper,
                                      const struct IlhMarketParams *market_params,
                                      double pool_return_rate,
                                      struct IlhStrangleParams *out_strangle,
                                      bool *out_feasible,
                                      double *out_required_return);

/**
 * # Safety
 * `pool` must be a live handle (it is copied); `strangle_params` valid;
 * `out` writable.
 */
enum IlhStatus ilh_hedge_new(const struct IlhPool *pool,
                             const struct IlhStrangleParams *strangle_params,
                             double pool_return_rate,
                             struct IlhHedge **out);

/**
 * # Safety
 * `hedge` must be NULL or a handle from `ilh_hedge_new` not yet freed.
 */
void ilh_hedge_free(struct IlhHedge *hedge);

/**
 * Total PnL at expiry price `price`.
 *
 * # Safety
 * `hedge` must be a live handle; `out` writable.
 */
enum IlhStatus ilh_hedge_total_pnl(const struct IlhHedge *hedge, double price, double *out);

/**
 * Evaluates the three inequalities and the grid check on `n_points` points
 * (0 selects the default grid).
 *
 * # Safety
 * `hedge` must be a live handle; `out` writable.
 */
enum IlhStatus ilh_hedge_check(const struct IlhHedge *hedge,
                               double lower,
                               double upper,
                               size_t n_points,
                               struct IlhCoverageReport *out);

/**
 * Replicates the pool's IL (or its negation) on a uniform grid with
 * `cells_per_side` cells on `(k_min, center)` and `(center, k_max)`.
 *
 * # Safety
 * `pool` must be a live handle; `out` writable.
 */
enum IlhStatus ilh_portfolio_build(const struct IlhPool *pool,
                                   enum IlhPayoff payoff,
                                   double center,
                                   double k_min,
                                   double k_max,
                                   size_t cells_per_side,
                                   struct IlhPortfolio **out);

/**
 * # Safety
 * `portfolio` must be NULL or a handle from `ilh_portfolio_build` not yet freed.
 */
void ilh_portfolio_free(struct IlhPortfolio *portfolio);

/**
 * # Safety
 * `portfolio` must be a live handle; `out` writable.
 */
enum IlhStatus ilh_portfolio_payoff(const struct IlhPortfolio *portfolio,
                                    double price,
                                    double *out);

/**
 * Present value under Black–Scholes premiums and the model discount bond.
 *
 * # Safety
 * `portfolio` must be a live handle; `market_params` valid; `out` writable.
 */
enum IlhStatus ilh_portfolio_present_value(const struct IlhPortfolio *portfolio,
                                           const struct IlhMarketParams *market_params,
                                           double *out);

/**
 * Portfolio as JSON; free the string with `ilh_string_free`.
 *
 * # Safety
 * `portfolio` must be a live handle; `out` writable.
 */
enum IlhStatus ilh_portfolio_to_json(const struct IlhPortfolio *portfolio, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ILHEDGE_H */
