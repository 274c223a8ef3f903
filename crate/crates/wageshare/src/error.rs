//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the wageshare library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation
    /// (non-positive input to a logarithm, labor share outside its interval, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data failed structural validation (unsorted panel, duplicate
    /// rows, malformed CSV fields, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A data source could not be ingested (missing file, missing column,
    /// unparseable row).
    #[error("ingest error: {0}")]
    Ingest(String),

    /// A required year is missing from an otherwise contiguous series.
    #[error("gap error: series {series} is missing years {}", fmt_years(missing))]
    Gap { series: String, missing: Vec<i32> },

    /// A numerical routine produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The regressor matrix is rank deficient or too ill-conditioned to solve.
    #[error("singular system: {0}")]
    Singular(String),

    /// Missing or invalid configuration (e.g. an empty API key).
    #[error("configuration error: {0}")]
    Config(String),

    /// A network request failed. `retryable` distinguishes transient
    /// transport failures from permanent ones such as an unknown series id.
    #[error("fetch error ({}): {message}", if *.retryable { "retryable" } else { "permanent" })]
    Fetch { message: String, retryable: bool },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

fn fmt_years(years: &[i32]) -> String {
    years
        .iter()
        .map(|y| y.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
