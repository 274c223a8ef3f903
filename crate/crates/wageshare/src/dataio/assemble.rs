//! Assembly of the full twelve-country panel from its source files.

use std::path::Path;

use crate::dataio::fred::{ingest_fred, read_annual_series, JP_TFP};
use crate::dataio::klems::{ingest_klems, KlemsOptions};
use crate::dataio::panel::{Country, Panel, PanelObservation};
use crate::error::Result;

/// Build the canonical panel: the eleven pooled countries from a KLEMS
/// extract (Japan's TFP overridden by its FRED series, expected as
/// `RTFPNAJPA632NRUG.csv` in `fred_dir`) plus the US from its five FRED
/// files.
pub fn build_panel(fred_dir: &Path, klems_file: &Path) -> Result<Panel> {
    let mut rows: Vec<PanelObservation> = Vec::new();

    let jp_tfp_path = fred_dir.join(format!("{JP_TFP}.csv"));
    for country in Country::POOL {
        let options = if country == Country::Jp {
            KlemsOptions {
                tfp_override: Some(read_annual_series(&jp_tfp_path, JP_TFP)?),
                ..KlemsOptions::default()
            }
        } else {
            KlemsOptions::default()
        };
        rows.extend(ingest_klems(klems_file, country, &options)?);
    }
    rows.extend(ingest_fred(fred_dir)?);

    rows.sort_by_key(|r| (r.country, r.year));
    Panel::from_rows(rows)
}
