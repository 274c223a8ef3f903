//! Data ingestion: FRED CSV exports and KLEMS-style extracts are
//! normalized into the canonical country-year panel.

mod assemble;
mod currency;
mod fetch;
mod fred;
mod klems;
mod panel;
pub(crate) mod util;

pub use assemble::build_panel;
pub use currency::{convert_currency, Currency, CurrencyRate, RATES};
pub use fetch::{fetch_fred, observations_to_csv, parse_observations, FredClient};
pub use fred::{
    ingest_fred, read_annual_series, read_quarterly_as_annual, read_series_csv, SeriesPoint,
    JP_TFP, US_CAPITAL, US_HOURS, US_LABOR_SHARE, US_REAL_GDP, US_TFP,
};
pub use klems::{ingest_klems, KlemsColumns, KlemsOptions};
pub use panel::{read_panel, write_panel, Country, Panel, PanelObservation};
pub use util::write_atomic;
