//! European option premiums and the unit discount bond.
//!
//! Hedging and replication only ever see premiums through [`OptionQuotes`],
//! so a table of market quotes ([`QuoteTable`]) and the Black–Scholes model
//! ([`BlackScholes`]) are interchangeable. Premiums are undiscounted amounts
//! netted against payoffs at expiry.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, OptionKind, Result};

/// Source of option premiums by strike.
pub trait OptionQuotes {
    fn call(&self, strike: f64) -> Result<f64>;
    fn put(&self, strike: f64) -> Result<f64>;

    fn quote(&self, kind: OptionKind, strike: f64) -> Result<f64> {
        match kind {
            OptionKind::Call => self.call(strike),
            OptionKind::Put => self.put(strike),
        }
    }
}

/// Quotes backed by a pair of closures.
pub struct QuoteFns<C, P> {
    pub call: C,
    pub put: P,
}

impl<C, P> OptionQuotes for QuoteFns<C, P>
where
    C: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    fn call(&self, strike: f64) -> Result<f64> {
        Ok((self.call)(strike))
    }

    fn put(&self, strike: f64) -> Result<f64> {
        Ok((self.put)(strike))
    }
}

#[derive(Debug, Deserialize)]
struct RawMarketParams {
    spot: f64,
    rate: f64,
    volatility: f64,
    expiry: f64,
}

/// Flat-volatility market snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMarketParams")]
pub struct MarketParams {
    spot: f64,
    /// Continuously compounded, per year.
    rate: f64,
    /// Annualised log-volatility.
    volatility: f64,
    /// Year fraction.
    expiry: f64,
}

impl TryFrom<RawMarketParams> for MarketParams {
    type Error = Error;

    fn try_from(raw: RawMarketParams) -> Result<Self> {
        MarketParams::new(raw.spot, raw.rate, raw.volatility, raw.expiry)
    }
}

impl MarketParams {
    pub fn new(spot: f64, rate: f64, volatility: f64, expiry: f64) -> Result<Self> {
        if !rate.is_finite() {
            return Err(Error::NonPositive {
                name: "rate",
                value: rate,
            });
        }
        Ok(Self {
            spot: positive("spot", spot)?,
            rate,
            volatility: non_negative("volatility", volatility)?,
            expiry: positive("expiry", expiry)?,
        })
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn volatility(&self) -> f64 {
        self.volatility
    }

    pub fn expiry(&self) -> f64 {
        self.expiry
    }

    /// Price at time 0 of one unit of numéraire paid at expiry.
    pub fn discount_bond(&self) -> f64 {
        (-self.rate * self.expiry).exp()
    }

    pub fn forward(&self) -> f64 {
        self.spot / self.discount_bond()
    }
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Black–Scholes pricer for European calls and puts.
///
/// Zero volatility is the deterministic-forward limit: premiums collapse to
/// discounted intrinsic value against the forward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlackScholes {
    market: MarketParams,
}

impl BlackScholes {
    pub fn new(market: MarketParams) -> Self {
        Self { market }
    }

    pub fn market(&self) -> &MarketParams {
        &self.market
    }

    pub fn discount_bond(&self) -> f64 {
        self.market.discount_bond()
    }

    fn d1_d2(&self, strike: f64) -> Option<(f64, f64)> {
        let m = &self.market;
        let sd = m.volatility * m.expiry.sqrt();
        if sd == 0.0 {
            return None;
        }
        let d1 = ((m.spot / strike).ln() + m.rate * m.expiry + 0.5 * sd * sd) / sd;
        Some((d1, d1 - sd))
    }

    pub fn call_price(&self, strike: f64) -> Result<f64> {
        let strike = positive("strike", strike)?;
        let b = self.discount_bond();
        let s = self.market.spot;
        let v = match self.d1_d2(strike) {
            None => s - strike * b,
            Some((d1, d2)) => s * norm_cdf(d1) - strike * b * norm_cdf(d2),
        };
        Ok(v.max(0.0))
    }

    pub fn put_price(&self, strike: f64) -> Result<f64> {
        let strike = positive("strike", strike)?;
        let b = self.discount_bond();
        let s = self.market.spot;
        let v = match self.d1_d2(strike) {
            None => strike * b - s,
            Some((d1, d2)) => strike * b * norm_cdf(-d2) - s * norm_cdf(-d1),
        };
        Ok(v.max(0.0))
    }
}

impl OptionQuotes for BlackScholes {
    fn call(&self, strike: f64) -> Result<f64> {
        self.call_price(strike)
    }

    fn put(&self, strike: f64) -> Result<f64> {
        self.put_price(strike)
    }
}

/// One row of a quote table: `kind,strike,premium`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuoteRow {
    pub kind: OptionKind,
    pub strike: f64,
    pub premium: f64,
}

/// Exact-strike premium lookup; no interpolation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuoteTable {
    quotes: HashMap<(OptionKind, u64), f64>,
}

impl QuoteTable {
    pub fn from_rows<I: IntoIterator<Item = QuoteRow>>(rows: I) -> Result<Self> {
        let mut quotes = HashMap::new();
        for (i, row) in rows.into_iter().enumerate() {
            let line = i + 1;
            if !(row.strike.is_finite() && row.strike > 0.0) {
                return Err(Error::QuoteTable(format!(
                    "row {line}: strike must be positive, got {}",
                    row.strike
                )));
            }
            if !(row.premium.is_finite() && row.premium >= 0.0) {
                return Err(Error::QuoteTable(format!(
                    "row {line}: premium must be non-negative, got {}",
                    row.premium
                )));
            }
            if let Some(prev) = quotes.insert((row.kind, row.strike.to_bits()), row.premium) {
                if prev != row.premium {
                    return Err(Error::QuoteTable(format!(
                        "row {line}: conflicting {} quotes at strike {}",
                        row.kind, row.strike
                    )));
                }
            }
        }
        Ok(Self { quotes })
    }

    /// Parses CSV with header `kind,strike,premium`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::QuoteTable(e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["kind", "strike", "premium"] {
            return Err(Error::QuoteTable(format!(
                "expected header `kind,strike,premium`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let rows = rdr
            .deserialize::<QuoteRow>()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::QuoteTable(e.to_string()))?;
        Self::from_rows(rows)
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::QuoteTable(format!("{}: {e}", path.display())))?;
        Self::from_csv(file)
    }

    pub fn len(&self) -> usize {
        self.quotes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotes.is_empty()
    }

    fn lookup(&self, kind: OptionKind, strike: f64) -> Result<f64> {
        self.quotes
            .get(&(kind, strike.to_bits()))
            .copied()
            .ok_or_else(|| Error::MissingQuotes(vec![(kind, strike)]))
    }
}

impl OptionQuotes for QuoteTable {
    fn call(&self, strike: f64) -> Result<f64> {
        self.lookup(OptionKind::Call, strike)
    }

    fn put(&self, strike: f64) -> Result<f64> {
        self.lookup(OptionKind::Put, strike)
    }
}
