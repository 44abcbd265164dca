//! Impermanent loss of constant-product AMM positions, static replication of
//! smooth payoffs with European options, and long-strangle hedging of the
//! loss over a price band.

pub mod amm;
pub mod cli;
pub mod error;
pub mod hedging;
pub mod pricing;
pub mod replication;

pub use amm::{PoolPosition, Price};
pub use error::{Error, OptionKind, Result};
pub use hedging::{
    check_proposition, check_proposition_with_grid, proposition_quantity_bounds,
    required_pool_return, solve_min_strangle, verify_coverage_grid, CoverageReport, GridMinimum,
    HedgeBand, HedgedPosition, InequalityVerdicts, Strangle, StrangleSolution,
};
pub use pricing::{BlackScholes, MarketParams, OptionQuotes, QuoteTable};
pub use replication::{
    build_portfolio, replication_error, ReplicationFit, ReplicationPortfolio, SmoothPayoff,
    StrikeGrid,
};
