//! Convenience client for downloading FRED series as `date,value` CSV.
//!
//! Checked-in snapshots are the test source of truth; this client only
//! exists to refresh them. Live vintages drift, so downloaded data are not
//! expected to reproduce snapshot-derived statistics exactly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use crate::dataio::util::write_atomic;
use crate::error::{Error, Result};

const DEFAULT_BASE_URL: &str = "https://api.stlouisfed.org/fred/series/observations";
const MAX_RETRIES: u32 = 3;

#[derive(Debug, Deserialize)]
struct ObservationsResponse {
    observations: Vec<Observation>,
}

#[derive(Debug, Deserialize)]
struct Observation {
    date: String,
    value: String,
}

/// Parse a FRED observations JSON payload into `(date, value)` pairs,
/// skipping the `.` missing-data marker.
pub fn parse_observations(json: &str) -> Result<Vec<(String, f64)>> {
    let parsed: ObservationsResponse = serde_json::from_str(json)
        .map_err(|e| Error::Fetch { message: format!("malformed response: {e}"), retryable: false })?;
    let mut out = Vec::with_capacity(parsed.observations.len());
    for obs in parsed.observations {
        if obs.value == "." {
            continue;
        }
        let value: f64 = obs.value.parse().map_err(|_| Error::Fetch {
            message: format!("unparseable value {:?} at {}", obs.value, obs.date),
            retryable: false,
        })?;
        out.push((obs.date, value));
    }
    Ok(out)
}

/// Render observations as the `date,value` CSV consumed by the ingesters.
pub fn observations_to_csv(observations: &[(String, f64)]) -> String {
    let mut out = String::from("date,value\n");
    for (date, value) in observations {
        out.push_str(&format!("{date},{value}\n"));
    }
    out
}

/// HTTP client for the FRED observations endpoint.
#[derive(Debug, Clone)]
pub struct FredClient {
    base_url: String,
    api_key: String,
}

impl FredClient {
    /// Build a client. The key comes from the `FRED_API_KEY` environment
    /// variable in the CLI; an empty key is a configuration error.
    pub fn new(api_key: &str) -> Result<Self> {
        if api_key.trim().is_empty() {
            return Err(Error::Config(
                "FRED API key is empty; set FRED_API_KEY".into(),
            ));
        }
        Ok(Self { base_url: DEFAULT_BASE_URL.to_string(), api_key: api_key.to_string() })
    }

    /// Override the endpoint (tests and mirrors).
    pub fn with_base_url(mut self, base_url: &str) -> Self {
        self.base_url = base_url.trim_end_matches('/').to_string();
        self
    }

    fn request_url(&self, series_id: &str) -> String {
        format!(
            "{}?series_id={}&api_key={}&file_type=json",
            self.base_url, series_id, self.api_key
        )
    }

    /// Fetch one series, retrying transient failures with exponential
    /// backoff. Client-side rejections (an unknown series id comes back as
    /// HTTP 400) are permanent.
    pub fn fetch_series(&self, series_id: &str) -> Result<Vec<(String, f64)>> {
        if series_id.trim().is_empty() {
            return Err(Error::Config("series id is empty".into()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| Error::Fetch { message: e.to_string(), retryable: false })?;

        let mut backoff = Duration::from_millis(500);
        let mut last_err = String::new();
        for attempt in 0..=MAX_RETRIES {
            if attempt > 0 {
                std::thread::sleep(backoff);
                backoff *= 2;
            }
            match client.get(self.request_url(series_id)).send() {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        let body = resp.text().map_err(|e| Error::Fetch {
                            message: e.to_string(),
                            retryable: true,
                        })?;
                        return parse_observations(&body);
                    }
                    if status.is_client_error() {
                        return Err(Error::Fetch {
                            message: format!("series {series_id:?} rejected with HTTP {status}"),
                            retryable: false,
                        });
                    }
                    last_err = format!("HTTP {status}");
                }
                Err(e) => last_err = e.to_string(),
            }
            log::warn!("fetch {series_id} attempt {} failed: {last_err}", attempt + 1);
        }
        Err(Error::Fetch {
            message: format!("series {series_id} failed after {MAX_RETRIES} retries: {last_err}"),
            retryable: true,
        })
    }

    /// Fetch a series and write `<series_id>.csv` into `out_dir`,
    /// overwriting any existing file.
    pub fn fetch_to_csv(&self, series_id: &str, out_dir: &Path) -> Result<PathBuf> {
        let observations = self.fetch_series(series_id)?;
        let path = out_dir.join(format!("{series_id}.csv"));
        write_atomic(&path, observations_to_csv(&observations).as_bytes())?;
        Ok(path)
    }

    /// Fetch a series as an annual year-to-value map.
    pub fn fetch_annual(&self, series_id: &str) -> Result<BTreeMap<i32, f64>> {
        let mut out = BTreeMap::new();
        for (date, value) in self.fetch_series(series_id)? {
            let year: i32 = date
                .get(..4)
                .and_then(|y| y.parse().ok())
                .ok_or_else(|| Error::Fetch {
                    message: format!("bad date {date:?} in {series_id}"),
                    retryable: false,
                })?;
            out.insert(year, value);
        }
        Ok(out)
    }
}

/// Fetch `series_id` with `api_key` and write it into `out_dir`.
pub fn fetch_fred(series_id: &str, api_key: &str, out_dir: &Path) -> Result<PathBuf> {
    FredClient::new(api_key)?.fetch_to_csv(series_id, out_dir)
}
