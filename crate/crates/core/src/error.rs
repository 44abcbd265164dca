use thiserror::Error;

/// Option kind used in quote lookups and error reports.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

impl std::fmt::Display for OptionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OptionKind::Call => f.write_str("call"),
            OptionKind::Put => f.write_str("put"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} must be strictly positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must be non-negative and finite, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("inconsistent pool: {0}")]
    InconsistentPool(String),

    #[error("invalid strike grid: {0}")]
    InvalidGrid(String),

    #[error("payoff `{label}` failed its derivative self-check at price {price}: {detail}")]
    PayoffSelfCheck {
        label: String,
        price: f64,
        detail: String,
    },

    #[error("band [{lower}, {upper}] does not contain the entry price {entry_price}")]
    BandExcludesEntry {
        lower: f64,
        upper: f64,
        entry_price: f64,
    },

    #[error("invalid band: {0}")]
    InvalidBand(String),

    #[error("invalid strangle: {0}")]
    InvalidStrangle(String),

    #[error("strike ordering violated: expected P_i <= K_p <= P_0 <= K_c <= P_s, got {lower} <= {put_strike} <= {entry_price} <= {call_strike} <= {upper}")]
    StrikeOrdering {
        lower: f64,
        put_strike: f64,
        entry_price: f64,
        call_strike: f64,
        upper: f64,
    },

    #[error("missing quotes for {}", format_missing(.0))]
    MissingQuotes(Vec<(OptionKind, f64)>),

    #[error("{kind} quote at strike {strike} is not a non-negative finite price: {value}")]
    BadQuote {
        kind: OptionKind,
        strike: f64,
        value: f64,
    },

    #[error("quote table: {0}")]
    QuoteTable(String),

    #[error("{0}")]
    Empty(&'static str),
}

fn format_missing(missing: &[(OptionKind, f64)]) -> String {
    missing
        .iter()
        .map(|(k, s)| format!("{k}@{s}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositive { name, value })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Negative { name, value })
    }
}
