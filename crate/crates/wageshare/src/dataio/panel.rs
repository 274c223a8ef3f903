//! The canonical country-year panel and its CSV serialization.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::dataio::currency::Currency;
use crate::dataio::util::write_atomic;
use crate::error::{Error, Result};

/// Countries covered by the panel. The declaration order is the canonical
/// sort order of the panel file (alphabetical by code).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Country {
    At,
    Be,
    De,
    Dk,
    Es,
    Fr,
    It,
    Jp,
    Nl,
    Se,
    Uk,
    Us,
}

impl Country {
    pub const ALL: [Country; 12] = [
        Country::At,
        Country::Be,
        Country::De,
        Country::Dk,
        Country::Es,
        Country::Fr,
        Country::It,
        Country::Jp,
        Country::Nl,
        Country::Se,
        Country::Uk,
        Country::Us,
    ];

    /// The eleven countries pooled in the non-US regression.
    pub const POOL: [Country; 11] = [
        Country::At,
        Country::Be,
        Country::De,
        Country::Dk,
        Country::Es,
        Country::Fr,
        Country::It,
        Country::Jp,
        Country::Nl,
        Country::Se,
        Country::Uk,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Country::At => "AT",
            Country::Be => "BE",
            Country::De => "DE",
            Country::Dk => "DK",
            Country::Es => "ES",
            Country::Fr => "FR",
            Country::It => "IT",
            Country::Jp => "JP",
            Country::Nl => "NL",
            Country::Se => "SE",
            Country::Uk => "UK",
            Country::Us => "US",
        }
    }

    pub fn currency(self) -> Currency {
        match self {
            Country::Dk => Currency::Dkk,
            Country::Jp => Currency::Jpy,
            Country::Se => Currency::Sek,
            Country::Uk => Currency::Gbp,
            Country::Us => Currency::Usd,
            _ => Currency::Eur,
        }
    }

    /// Reference coverage window for each country's sources. Ingested data
    /// outside this window are accepted with a warning, since source
    /// vintages drift.
    pub fn reference_years(self) -> (i32, i32) {
        match self {
            Country::Us => (1954, 2019),
            Country::Jp => (1995, 2020),
            _ => (1995, 2021),
        }
    }
}

impl fmt::Display for Country {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Country {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Country::ALL
            .iter()
            .copied()
            .find(|c| c.code() == s)
            .ok_or_else(|| Error::Domain(format!("unknown country code {s:?}")))
    }
}

/// One country-year observation. Wage and the capital-labor ratio are
/// derived quantities, recomputed from the stored fields rather than stored
/// independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelObservation {
    pub country: Country,
    pub year: i32,
    /// Real output (millions of 2015 EUR; US in native units).
    pub output: f64,
    /// Total labor hours.
    pub hours: f64,
    /// Real capital stock, same currency units as output.
    pub capital: f64,
    /// TFP index, normalized to one in the first year of the sample.
    pub tfp: f64,
    /// Labor share of output, strictly inside (0, 1).
    pub labor_share: f64,
}

impl PanelObservation {
    pub fn new(
        country: Country,
        year: i32,
        output: f64,
        hours: f64,
        capital: f64,
        tfp: f64,
        labor_share: f64,
    ) -> Result<Self> {
        let row = Self { country, year, output, hours, capital, tfp, labor_share };
        row.validate()?;
        Ok(row)
    }

    pub fn validate(&self) -> Result<()> {
        let ctx = format!("{} {}", self.country, self.year);
        for (name, v) in [
            ("output", self.output),
            ("hours", self.hours),
            ("capital", self.capital),
            ("tfp", self.tfp),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validation(format!("{ctx}: {name} must be positive, got {v}")));
            }
        }
        if !(self.labor_share > 0.0 && self.labor_share < 1.0) {
            return Err(Error::Validation(format!(
                "{ctx}: labor share must lie in (0, 1), got {}",
                self.labor_share
            )));
        }
        Ok(())
    }

    /// Hourly wage `labor_share * output / hours`.
    pub fn wage(&self) -> f64 {
        self.labor_share * self.output / self.hours
    }

    /// Capital-labor ratio `capital / hours`.
    pub fn k_ratio(&self) -> f64 {
        self.capital / self.hours
    }
}

/// An immutable, validated panel: rows sorted by (country, year) with no
/// duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    rows: Vec<PanelObservation>,
}

impl Panel {
    pub fn from_rows(rows: Vec<PanelObservation>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Validation("panel must contain at least one row".into()));
        }
        for row in &rows {
            row.validate()?;
        }
        for pair in rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let ka = (a.country, a.year);
            let kb = (b.country, b.year);
            if ka == kb {
                return Err(Error::Validation(format!(
                    "duplicate panel row for ({}, {})",
                    a.country, a.year
                )));
            }
            if ka > kb {
                return Err(Error::Validation(format!(
                    "panel rows must be sorted by (country, year): ({}, {}) precedes ({}, {})",
                    a.country, a.year, b.country, b.year
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[PanelObservation] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Countries present, in canonical order.
    pub fn countries(&self) -> Vec<Country> {
        let mut out: Vec<Country> = Vec::new();
        for row in &self.rows {
            if out.last() != Some(&row.country) {
                out.push(row.country);
            }
        }
        out
    }

    /// Contiguous slice of this country's rows (the panel is sorted).
    pub fn country_rows(&self, country: Country) -> &[PanelObservation] {
        let start = self.rows.partition_point(|r| r.country < country);
        let end = self.rows.partition_point(|r| r.country <= country);
        &self.rows[start..end]
    }

    /// Canonical CSV serialization; fields use the shortest decimal
    /// representation that round-trips, so a write/read cycle is lossless.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("country,year,output,hours,capital,tfp,labor_share\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.country, r.year, r.output, r.hours, r.capital, r.tfp, r.labor_share
            ));
        }
        out
    }

    /// SHA-256 of the canonical CSV bytes, for reproducibility stamps.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_csv_string().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Write the canonical panel CSV (atomically: temp file plus rename).
pub fn write_panel(panel: &Panel, path: &Path) -> Result<()> {
    write_atomic(path, panel.to_csv_string().as_bytes())
}

/// Read and validate a canonical panel CSV.
pub fn read_panel(path: &Path) -> Result<Panel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Ingest(format!("cannot open panel file {}: {e}", path.display())))?;

    let headers = reader.headers()?.clone();
    let expected = ["country", "year", "output", "hours", "capital", "tfp", "labor_share"];
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(Error::Validation(format!(
            "panel header mismatch: expected {expected:?}, got {got:?}"
        )));
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2; // header is line 1
        let field = |idx: usize, name: &str| -> Result<&str> {
            record
                .get(idx)
                .ok_or_else(|| Error::Validation(format!("line {line}: missing field {name}")))
        };
        let parse_f64 = |idx: usize, name: &str| -> Result<f64> {
            let raw = field(idx, name)?;
            raw.parse::<f64>().map_err(|_| {
                Error::Validation(format!("line {line}: cannot parse {name} from {raw:?}"))
            })
        };
        let country: Country = field(0, "country")?.parse()?;
        let year: i32 = field(1, "year")?
            .parse()
            .map_err(|_| Error::Validation(format!("line {line}: cannot parse year")))?;
        rows.push(PanelObservation {
            country,
            year,
            output: parse_f64(2, "output")?,
            hours: parse_f64(3, "hours")?,
            capital: parse_f64(4, "capital")?,
            tfp: parse_f64(5, "tfp")?,
            labor_share: parse_f64(6, "labor_share")?,
        });
    }
    Panel::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(country: Country, year: i32) -> PanelObservation {
        PanelObservation::new(country, year, 1000.0, 10.0, 5000.0, 1.0, 0.6).unwrap()
    }

    #[test]
    fn derived_fields_are_recomputed() {
        let r = PanelObservation::new(Country::Us, 2000, 1200.0, 30.0, 6000.0, 1.1, 0.65).unwrap();
        assert_eq!(r.wage(), 0.65 * 1200.0 / 30.0);
        assert_eq!(r.k_ratio(), 6000.0 / 30.0);
    }

    #[test]
    fn rejects_out_of_range_fields() {
        assert!(PanelObservation::new(Country::Us, 2000, -1.0, 30.0, 60.0, 1.0, 0.6).is_err());
        assert!(PanelObservation::new(Country::Us, 2000, 1.0, 30.0, 60.0, 1.0, 1.0).is_err());
        assert!(PanelObservation::new(Country::Us, 2000, 1.0, 30.0, 60.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn duplicate_rows_are_rejected() {
        let err = Panel::from_rows(vec![row(Country::Us, 2000), row(Country::Us, 2000)]);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn unsorted_rows_are_rejected() {
        let err = Panel::from_rows(vec![row(Country::Us, 2001), row(Country::Us, 2000)]);
        assert!(matches!(err, Err(Error::Validation(_))));
        let err = Panel::from_rows(vec![row(Country::Us, 2000), row(Country::At, 2000)]);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn country_rows_slices_by_country() {
        let panel = Panel::from_rows(vec![
            row(Country::At, 1995),
            row(Country::At, 1996),
            row(Country::Us, 1954),
        ])
        .unwrap();
        assert_eq!(panel.country_rows(Country::At).len(), 2);
        assert_eq!(panel.country_rows(Country::Us).len(), 1);
        assert_eq!(panel.country_rows(Country::Jp).len(), 0);
        assert_eq!(panel.countries(), vec![Country::At, Country::Us]);
    }

    #[test]
    fn write_read_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("panel.csv");
        let panel = Panel::from_rows(vec![
            PanelObservation::new(Country::Dk, 1995, 123.456789012345, 7.25, 987.1, 1.0, 0.61234567)
                .unwrap(),
            PanelObservation::new(Country::Dk, 1996, 130.0, 7.5, 1001.0, 1.0321, 0.615).unwrap(),
        ])
        .unwrap();
        write_panel(&panel, &path).unwrap();
        let back = read_panel(&path).unwrap();
        assert_eq!(back, panel);
        assert_eq!(back.content_hash(), panel.content_hash());
    }

    #[test]
    fn content_hash_is_stable_and_sensitive() {
        let a = Panel::from_rows(vec![row(Country::Us, 2000)]).unwrap();
        let b = Panel::from_rows(vec![row(Country::Us, 2001)]).unwrap();
        assert_eq!(a.content_hash(), a.content_hash());
        assert_ne!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash().len(), 64);
    }

    proptest! {
        // Lossless serialization for realistic magnitudes.
        #[test]
        fn csv_round_trip_is_lossless(
            output in 1e-3..1e9f64,
            hours in 1e-3..1e7f64,
            capital in 1e-3..1e10f64,
            tfp in 0.1..10.0f64,
            labor_share in 0.01..0.99f64,
        ) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("p.csv");
            let panel = Panel::from_rows(vec![PanelObservation::new(
                Country::Se, 2003, output, hours, capital, tfp, labor_share,
            ).unwrap()]).unwrap();
            write_panel(&panel, &path).unwrap();
            let back = read_panel(&path).unwrap();
            prop_assert_eq!(back.rows()[0], panel.rows()[0]);
        }
    }
}
