//! Readers for FRED-style `date,value` CSV exports and the assembly of the
//! US panel from its five source series.

use std::collections::BTreeMap;
use std::path::Path;

use crate::dataio::panel::{Country, PanelObservation};
use crate::error::{Error, Result};

/// US source series ids, one file per series in the ingest directory.
pub const US_REAL_GDP: &str = "GDPC1";
pub const US_TFP: &str = "RTFPNAUSA632NRUG";
pub const US_CAPITAL: &str = "RKNANPUSA666NRUG";
pub const US_HOURS: &str = "B4701C0A222NBEA";
pub const US_LABOR_SHARE: &str = "LABSHPUSA156NRUG";
/// Japan's TFP series, used to override the KLEMS TFP column.
pub const JP_TFP: &str = "RTFPNAJPA632NRUG";

/// One dated observation from a `date,value` CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub year: i32,
    pub month: u32,
    pub value: f64,
}

/// Read a two-column `date,value` CSV with ISO dates. Rows whose value is
/// the FRED missing-data marker `.` are skipped.
pub fn read_series_csv(path: &Path, series: &str) -> Result<Vec<SeriesPoint>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Ingest(format!("missing series file for {series}: {e}")))?;
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let date = record
            .get(0)
            .ok_or_else(|| Error::Ingest(format!("{series} line {line}: missing date field")))?;
        let raw = record
            .get(1)
            .ok_or_else(|| Error::Ingest(format!("{series} line {line}: missing value field")))?;
        if raw == "." {
            continue;
        }
        let value: f64 = raw.parse().map_err(|_| {
            Error::Ingest(format!("{series} line {line}: cannot parse value {raw:?}"))
        })?;
        let (year, month) = parse_iso_date(date)
            .ok_or_else(|| Error::Ingest(format!("{series} line {line}: bad date {date:?}")))?;
        points.push(SeriesPoint { year, month, value });
    }
    Ok(points)
}

fn parse_iso_date(s: &str) -> Option<(i32, u32)> {
    let mut parts = s.split('-');
    let year = parts.next()?.parse().ok()?;
    let month = parts.next()?.parse().ok()?;
    Some((year, month))
}

/// Read an annual series (one observation per year).
pub fn read_annual_series(path: &Path, series: &str) -> Result<BTreeMap<i32, f64>> {
    let mut out = BTreeMap::new();
    for p in read_series_csv(path, series)? {
        if out.insert(p.year, p.value).is_some() {
            return Err(Error::Ingest(format!("{series}: duplicate observation for {}", p.year)));
        }
    }
    Ok(out)
}

/// Read a quarterly series and average it to annual frequency. Years with
/// fewer than four quarters at either end of the series are dropped with a
/// warning; a short year in the interior is a gap.
pub fn read_quarterly_as_annual(path: &Path, series: &str) -> Result<BTreeMap<i32, f64>> {
    let points = read_series_csv(path, series)?;
    let mut by_year: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
    for p in points {
        by_year.entry(p.year).or_default().push(p.value);
    }
    let years: Vec<i32> = by_year.keys().copied().collect();
    let mut out = BTreeMap::new();
    for (idx, (&year, quarters)) in by_year.iter().enumerate() {
        if quarters.len() != 4 {
            let at_edge = idx == 0 || idx == years.len() - 1;
            if at_edge {
                log::warn!(
                    "{series}: dropping partial year {year} ({} quarters)",
                    quarters.len()
                );
                continue;
            }
            return Err(Error::Gap { series: series.to_string(), missing: vec![year] });
        }
        out.insert(year, quarters.iter().sum::<f64>() / quarters.len() as f64);
    }
    Ok(out)
}

/// Check that `series` covers every year of `range`, returning the values in
/// year order.
fn require_full_coverage(
    series: &BTreeMap<i32, f64>,
    name: &str,
    range: std::ops::RangeInclusive<i32>,
) -> Result<Vec<f64>> {
    let missing: Vec<i32> = range.clone().filter(|y| !series.contains_key(y)).collect();
    if !missing.is_empty() {
        return Err(Error::Gap { series: name.to_string(), missing });
    }
    Ok(range.map(|y| series[&y]).collect())
}

/// Assemble the US panel rows from the five FRED source files in
/// `directory`. Quarterly GDP is averaged to annual; TFP is renormalized to
/// one in the first covered year; rows span the years common to all five
/// series.
pub fn ingest_fred(directory: &Path) -> Result<Vec<PanelObservation>> {
    let file = |id: &str| directory.join(format!("{id}.csv"));

    let gdp = read_quarterly_as_annual(&file(US_REAL_GDP), US_REAL_GDP)?;
    let tfp = read_annual_series(&file(US_TFP), US_TFP)?;
    let capital = read_annual_series(&file(US_CAPITAL), US_CAPITAL)?;
    let hours = read_annual_series(&file(US_HOURS), US_HOURS)?;
    let labor_share = read_annual_series(&file(US_LABOR_SHARE), US_LABOR_SHARE)?;

    let named: [(&str, &BTreeMap<i32, f64>); 5] = [
        (US_REAL_GDP, &gdp),
        (US_TFP, &tfp),
        (US_CAPITAL, &capital),
        (US_HOURS, &hours),
        (US_LABOR_SHARE, &labor_share),
    ];
    for (name, series) in &named {
        if series.is_empty() {
            return Err(Error::Ingest(format!("{name}: no observations")));
        }
    }
    let first = named.iter().map(|(_, s)| *s.keys().next().unwrap()).max().unwrap();
    let last = named.iter().map(|(_, s)| *s.keys().last().unwrap()).min().unwrap();
    if first > last {
        return Err(Error::Ingest(
            "US source series have no overlapping years".into(),
        ));
    }

    let (ref_first, ref_last) = Country::Us.reference_years();
    if first < ref_first || last > ref_last {
        log::warn!(
            "US ingest covers {first}-{last}, outside the reference window {ref_first}-{ref_last}"
        );
    }

    let gdp_v = require_full_coverage(&gdp, US_REAL_GDP, first..=last)?;
    let tfp_v = require_full_coverage(&tfp, US_TFP, first..=last)?;
    let capital_v = require_full_coverage(&capital, US_CAPITAL, first..=last)?;
    let hours_v = require_full_coverage(&hours, US_HOURS, first..=last)?;
    let share_v = require_full_coverage(&labor_share, US_LABOR_SHARE, first..=last)?;

    let tfp_base = tfp_v[0];
    if !(tfp_base > 0.0) {
        return Err(Error::Ingest(format!("{US_TFP}: base-year value must be positive")));
    }

    let mut rows = Vec::with_capacity(gdp_v.len());
    for (i, year) in (first..=last).enumerate() {
        rows.push(PanelObservation::new(
            Country::Us,
            year,
            gdp_v[i],
            hours_v[i],
            capital_v[i],
            tfp_v[i] / tfp_base,
            share_v[i],
        )?);
    }
    Ok(rows)
}
