//! Constant-product pool position math.
//!
//! Convention: the pool holds a risky token (e.g. ETH) and a numéraire token
//! (e.g. USDC). A price `P` is numéraire units per risky unit, so the pool's
//! marginal price is `numeraire / risky` and the reserves satisfy
//! `risky * numeraire = k`. Every value returned here is in numéraire units.
//!
//! Impermanent loss is the price-only form: no fee accrual between entry and
//! withdrawal is modelled, so the position is fully described by its entry
//! snapshot.

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};

/// Relative tolerance for the `numeraire / risky == entry_price` check.
pub const PRICE_CONSISTENCY_TOL: f64 = 1e-9;

/// Strictly positive, finite price of one risky unit in numéraire units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Price(f64);

impl Price {
    pub fn new(value: f64) -> Result<Self> {
        positive("price", value).map(Price)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Price {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Price::new(value)
    }
}

impl<'de> Deserialize<'de> for Price {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Price::new(v).map_err(serde::de::Error::custom)
    }
}

/// Liquidity deposit snapshot at entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoolPosition {
    risky_amount_0: f64,
    numeraire_amount_0: f64,
    entry_price: f64,
    invariant_k: f64,
    capital: f64,
}

impl PoolPosition {
    /// Position from deposited reserves; the entry price is implied by the
    /// marginal-price identity.
    pub fn from_reserves(risky_amount: f64, numeraire_amount: f64) -> Result<Self> {
        let risky = positive("risky_amount", risky_amount)?;
        let numeraire = positive("numeraire_amount", numeraire_amount)?;
        let entry_price = positive("entry_price", numeraire / risky)?;
        Ok(Self::assemble(risky, numeraire, entry_price))
    }

    /// Position from reserves plus an explicitly quoted entry price, which must
    /// agree with `numeraire / risky` to within [`PRICE_CONSISTENCY_TOL`].
    pub fn from_reserves_at_price(
        risky_amount: f64,
        numeraire_amount: f64,
        entry_price: f64,
    ) -> Result<Self> {
        let risky = positive("risky_amount", risky_amount)?;
        let numeraire = positive("numeraire_amount", numeraire_amount)?;
        let entry_price = positive("entry_price", entry_price)?;
        let implied = numeraire / risky;
        if ((implied - entry_price) / entry_price).abs() > PRICE_CONSISTENCY_TOL {
            return Err(Error::InconsistentPool(format!(
                "numeraire/risky = {implied} but entry price is {entry_price}"
            )));
        }
        Ok(Self::assemble(risky, numeraire, entry_price))
    }

    /// Position from total deposited capital and entry price; the deposit is
    /// split evenly by value between the two tokens.
    pub fn from_capital(capital: f64, entry_price: f64) -> Result<Self> {
        let capital = positive("capital", capital)?;
        let entry_price = positive("entry_price", entry_price)?;
        let numeraire = capital / 2.0;
        let risky = numeraire / entry_price;
        positive("risky_amount", risky)?;
        positive("numeraire_amount", numeraire)?;
        Ok(Self {
            risky_amount_0: risky,
            numeraire_amount_0: numeraire,
            entry_price,
            invariant_k: risky * numeraire,
            capital,
        })
    }

    fn assemble(risky: f64, numeraire: f64, entry_price: f64) -> Self {
        Self {
            risky_amount_0: risky,
            numeraire_amount_0: numeraire,
            entry_price,
            invariant_k: risky * numeraire,
            capital: numeraire + risky * entry_price,
        }
    }

    pub fn risky_amount_0(&self) -> f64 {
        self.risky_amount_0
    }

    pub fn numeraire_amount_0(&self) -> f64 {
        self.numeraire_amount_0
    }

    pub fn entry_price(&self) -> f64 {
        self.entry_price
    }

    pub fn invariant_k(&self) -> f64 {
        self.invariant_k
    }

    /// Entry value `c = y_0 + x_0 * P_0`.
    pub fn capital(&self) -> f64 {
        self.capital
    }

    /// Pool reserves after arbitrage has moved the marginal price to `p`:
    /// `(sqrt(k / p), sqrt(k * p))`.
    pub fn reserves_at_price(&self, p: Price) -> (f64, f64) {
        let p = p.value();
        ((self.invariant_k / p).sqrt(), (self.invariant_k * p).sqrt())
    }

    /// Value of the pooled position at price `p`: `c * sqrt(p / P_0)`.
    pub fn value_pool(&self, p: Price) -> f64 {
        self.capital * (p.value() / self.entry_price).sqrt()
    }

    /// Value of the tokens had they been held outside the pool.
    pub fn value_hold(&self, p: Price) -> f64 {
        self.numeraire_amount_0 + self.risky_amount_0 * p.value()
    }

    /// Impermanent loss `c * (sqrt(p/P_0) - (p/P_0 + 1) / 2)`.
    ///
    /// Evaluated as `-(c/2) * (sqrt(p/P_0) - 1)^2`, which is the same
    /// quantity without the cancellation near `P_0` and is never positive.
    pub fn il(&self, p: Price) -> f64 {
        let d = (p.value() / self.entry_price).sqrt() - 1.0;
        0.0 - 0.5 * self.capital * d * d
    }

    /// First derivative of [`il`](Self::il): `(c / 2P_0) (sqrt(P_0/p) - 1)`.
    pub fn il_slope(&self, p: Price) -> f64 {
        self.capital / (2.0 * self.entry_price) * ((self.entry_price / p.value()).sqrt() - 1.0)
    }

    /// Second derivative of [`il`](Self::il): `-c / (4 sqrt(P_0) p^{3/2})`.
    pub fn il_curvature(&self, p: Price) -> f64 {
        let p = p.value();
        -self.capital / (4.0 * self.entry_price.sqrt() * p * p.sqrt())
    }
}
