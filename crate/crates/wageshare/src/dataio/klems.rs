//! Reader for KLEMS-style national-accounts extracts.
//!
//! The extract is a single CSV holding every country's rows; column names
//! are configurable because the source variable codes vary by vintage.
//! Monetary columns are converted to euros at the fixed 2015 rates and the
//! TFP index is renormalized to one in the first covered year.

use std::collections::BTreeMap;
use std::path::Path;

use crate::dataio::currency::convert_currency;
use crate::dataio::panel::{Country, PanelObservation};
use crate::error::{Error, Result};

/// Column mapping for a KLEMS-style extract.
#[derive(Debug, Clone)]
pub struct KlemsColumns {
    pub country: String,
    pub year: String,
    pub output: String,
    pub hours: String,
    pub capital: String,
    pub labor_share: String,
    pub tfp: String,
}

impl Default for KlemsColumns {
    fn default() -> Self {
        Self {
            country: "country".into(),
            year: "year".into(),
            output: "output".into(),
            hours: "hours".into(),
            capital: "capital".into(),
            labor_share: "labor_share".into(),
            tfp: "tfp".into(),
        }
    }
}

/// Options for [`ingest_klems`].
#[derive(Debug, Clone, Default)]
pub struct KlemsOptions {
    pub columns: KlemsColumns,
    /// Replacement TFP series keyed by year (e.g. Japan's TFP, which comes
    /// from FRED rather than the KLEMS extract). Values are renormalized to
    /// the first covered year after substitution.
    pub tfp_override: Option<BTreeMap<i32, f64>>,
}

/// Ingest one country's rows from a KLEMS-style extract.
pub fn ingest_klems(
    file: &Path,
    country: Country,
    options: &KlemsOptions,
) -> Result<Vec<PanelObservation>> {
    let cols = &options.columns;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(file)
        .map_err(|e| Error::Ingest(format!("cannot open KLEMS file {}: {e}", file.display())))?;

    let headers = reader.headers()?.clone();
    let index_of = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Ingest(format!("KLEMS file {} is missing column {name:?}", file.display()))
        })
    };
    let c_country = index_of(&cols.country)?;
    let c_year = index_of(&cols.year)?;
    let c_output = index_of(&cols.output)?;
    let c_hours = index_of(&cols.hours)?;
    let c_capital = index_of(&cols.capital)?;
    let c_share = index_of(&cols.labor_share)?;
    let c_tfp = index_of(&cols.tfp)?;

    struct RawRow {
        output: f64,
        hours: f64,
        capital: f64,
        labor_share: f64,
        tfp: f64,
    }

    let mut raw: BTreeMap<i32, RawRow> = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        // Extracts may carry countries beyond the twelve analyzed here;
        // rows for other codes are simply skipped.
        let code = record.get(c_country).unwrap_or_default();
        if code != country.code() {
            continue;
        }
        let parse_f64 = |idx: usize, name: &str| -> Result<f64> {
            let rawv = record.get(idx).unwrap_or_default();
            rawv.parse::<f64>().map_err(|_| {
                Error::Ingest(format!(
                    "KLEMS line {line} ({code}): cannot parse {name} from {rawv:?}"
                ))
            })
        };
        let year: i32 = record
            .get(c_year)
            .unwrap_or_default()
            .parse()
            .map_err(|_| Error::Ingest(format!("KLEMS line {line} ({code}): cannot parse year")))?;
        let labor_share = parse_f64(c_share, "labor share")?;
        if !(labor_share > 0.0 && labor_share < 1.0) {
            return Err(Error::Validation(format!(
                "KLEMS {code} {year}: labor share {labor_share} outside (0, 1)"
            )));
        }
        let row = RawRow {
            output: parse_f64(c_output, "output")?,
            hours: parse_f64(c_hours, "hours")?,
            capital: parse_f64(c_capital, "capital")?,
            labor_share,
            tfp: parse_f64(c_tfp, "TFP")?,
        };
        if raw.insert(year, row).is_some() {
            return Err(Error::Ingest(format!("KLEMS {code}: duplicate year {year}")));
        }
    }

    if raw.is_empty() {
        return Err(Error::Ingest(format!(
            "country {} not found in KLEMS file {}",
            country.code(),
            file.display()
        )));
    }

    let years: Vec<i32> = raw.keys().copied().collect();
    let (first, last) = (years[0], *years.last().unwrap());
    let missing: Vec<i32> = (first..=last).filter(|y| !raw.contains_key(y)).collect();
    if !missing.is_empty() {
        return Err(Error::Gap { series: format!("KLEMS {}", country.code()), missing });
    }

    let (ref_first, ref_last) = country.reference_years();
    if first < ref_first || last > ref_last {
        log::warn!(
            "KLEMS {} covers {first}-{last}, outside the reference window {ref_first}-{ref_last}",
            country.code()
        );
    }

    // Substitute the TFP series when an override is supplied.
    let tfp_by_year: BTreeMap<i32, f64> = match &options.tfp_override {
        Some(series) => {
            let missing: Vec<i32> =
                (first..=last).filter(|y| !series.contains_key(y)).collect();
            if !missing.is_empty() {
                return Err(Error::Gap {
                    series: format!("TFP override for {}", country.code()),
                    missing,
                });
            }
            (first..=last).map(|y| (y, series[&y])).collect()
        }
        None => raw.iter().map(|(&y, r)| (y, r.tfp)).collect(),
    };
    let tfp_base = tfp_by_year[&first];
    if !(tfp_base > 0.0) {
        return Err(Error::Ingest(format!(
            "KLEMS {}: base-year TFP must be positive",
            country.code()
        )));
    }

    let currency = country.currency();
    let mut rows = Vec::with_capacity(raw.len());
    for (year, r) in raw {
        rows.push(PanelObservation::new(
            country,
            year,
            convert_currency(r.output, currency),
            r.hours,
            convert_currency(r.capital, currency),
            tfp_by_year[&year] / tfp_base,
            r.labor_share,
        )?);
    }
    Ok(rows)
}
