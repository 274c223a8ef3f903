//! Fixed 2015 currency conversion.
//!
//! Non-euro, non-dollar series are converted to euros at the average 2015
//! closing rates, 2015 being the reference year of the chained-volume
//! series. US data stay in native units and are fit separately, so the
//! dollar passes through unconverted.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Currency {
    Eur,
    Dkk,
    Jpy,
    Sek,
    Gbp,
    Usd,
}

/// A currency together with its fixed conversion rate to euros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrencyRate {
    pub currency: Currency,
    pub rate_to_eur: f64,
}

/// Fixed 2015 average rates.
pub const RATES: [CurrencyRate; 6] = [
    CurrencyRate { currency: Currency::Eur, rate_to_eur: 1.0 },
    CurrencyRate { currency: Currency::Dkk, rate_to_eur: 0.13404 },
    CurrencyRate { currency: Currency::Jpy, rate_to_eur: 0.00744 },
    CurrencyRate { currency: Currency::Sek, rate_to_eur: 0.107 },
    CurrencyRate { currency: Currency::Gbp, rate_to_eur: 1.3761 },
    // US series are analyzed in native units.
    CurrencyRate { currency: Currency::Usd, rate_to_eur: 1.0 },
];

impl Currency {
    pub fn rate_to_eur(self) -> f64 {
        RATES
            .iter()
            .find(|r| r.currency == self)
            .map(|r| r.rate_to_eur)
            .expect("every currency has a rate")
    }

    pub fn code(self) -> &'static str {
        match self {
            Currency::Eur => "EUR",
            Currency::Dkk => "DKK",
            Currency::Jpy => "JPY",
            Currency::Sek => "SEK",
            Currency::Gbp => "GBP",
            Currency::Usd => "USD",
        }
    }
}

impl std::str::FromStr for Currency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "EUR" => Ok(Currency::Eur),
            "DKK" => Ok(Currency::Dkk),
            "JPY" => Ok(Currency::Jpy),
            "SEK" => Ok(Currency::Sek),
            "GBP" => Ok(Currency::Gbp),
            "USD" => Ok(Currency::Usd),
            other => Err(Error::Domain(format!("unknown currency code {other:?}"))),
        }
    }
}

/// Convert `value` from `currency` into euros at the fixed 2015 rate.
pub fn convert_currency(value: f64, currency: Currency) -> f64 {
    value * currency.rate_to_eur()
}
