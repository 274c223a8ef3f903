//! Wage elasticity of the labor share and the decomposition of observed
//! wage growth into TFP, labor-share, and capital-deepening components.
//!
//! Both are derivatives of the fitted log wage
//! `ln w = ln lambda + alpha0 + ln A + (1 - lambda) ln k
//!         + (alpha1/2) lambda (1 - lambda) (ln k)^2`:
//! the elasticity is its derivative in `ln lambda`, and the growth
//! decomposition is its total time derivative with each channel priced at
//! the fitted coefficients.

use std::path::Path;

use crate::dataio::{write_atomic, Country, Panel, PanelObservation};
use crate::econometrics::FitResult;
use crate::error::{Error, Result};

/// Direct, indirect, and net components of `d ln w / d ln lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticityComponents {
    /// Always one: the mechanical effect of the share on the wage bill.
    pub direct: f64,
    /// Output channel `net - direct`; negative when a higher share lowers
    /// output by enough to offset the direct gain.
    pub indirect: f64,
    pub net: f64,
}

/// Elasticity of the wage with respect to the labor share at one
/// observation, evaluated at slope `alpha1`:
/// `net = 1 - lambda ln k + (alpha1/2) lambda (1 - 2 lambda) (ln k)^2`.
///
/// This is the exact derivative of the fitted log wage in `ln lambda`.
pub fn wage_share_elasticity(lambda: f64, k: f64, alpha1: f64) -> Result<ElasticityComponents> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("labor share must lie in (0, 1), got {lambda}")));
    }
    if !(k > 0.0) {
        return Err(Error::Domain(format!("capital-labor ratio must be positive, got {k}")));
    }
    let ln_k = k.ln();
    let net = 1.0 - lambda * ln_k + 0.5 * alpha1 * lambda * (1.0 - 2.0 * lambda) * ln_k * ln_k;
    Ok(ElasticityComponents { direct: 1.0, indirect: net - 1.0, net })
}

/// Derivative of the fitted log wage in `ln k`, used by the growth
/// decomposition: `(1 - lambda)(1 + alpha1 lambda ln k)`.
fn capital_deepening_bracket(lambda: f64, k: f64, alpha1: f64) -> f64 {
    (1.0 - lambda) * (1.0 + alpha1 * lambda * k.ln())
}

/// Country-mean elasticity components with a 95% confidence band on the
/// net effect.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityRecord {
    pub country: Country,
    pub mean_direct: f64,
    pub mean_indirect: f64,
    pub mean_net: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ElasticityRecord {
    /// Standard error implied by the endpoint band, `half-width / 1.96`.
    pub fn implied_se(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low) / 1.96
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values {
        sum += v;
        n += 1;
    }
    sum / n as f64
}

/// Per-country time means of the elasticity components. The US uses its
/// own fitted slope; every other country uses the pooled slope. The band
/// re-evaluates the whole series at `alpha1 +- 1.96 SE(alpha1)` and takes
/// the min/max of the resulting means (the derivative is monotone in
/// `alpha1` pointwise, so the band is exact for the mean).
pub fn elasticity_table(
    panel: &Panel,
    us_fit: &FitResult,
    pool_fit: &FitResult,
) -> Result<Vec<ElasticityRecord>> {
    let mut records = Vec::new();
    for country in panel.countries() {
        let fit = match country {
            Country::Us => us_fit,
            _ => pool_fit,
        };
        let rows = panel.country_rows(country);
        if rows.is_empty() {
            return Err(Error::Validation(format!(
                "no fit assignment possible: {country} has no rows"
            )));
        }
        let series_mean = |alpha1: f64| -> Result<f64> {
            let mut nets = Vec::with_capacity(rows.len());
            for r in rows {
                nets.push(wage_share_elasticity(r.labor_share, r.k_ratio(), alpha1)?.net);
            }
            Ok(mean(nets.into_iter()))
        };
        let mean_net = series_mean(fit.alpha1)?;
        let lo_end = series_mean(fit.alpha1 - 1.96 * fit.se_alpha1)?;
        let hi_end = series_mean(fit.alpha1 + 1.96 * fit.se_alpha1)?;
        let mean_indirect = mean(
            rows.iter()
                .map(|r| wage_share_elasticity(r.labor_share, r.k_ratio(), fit.alpha1))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .map(|c| c.indirect),
        );
        records.push(ElasticityRecord {
            country,
            mean_direct: 1.0,
            mean_indirect,
            mean_net,
            ci_low: lo_end.min(hi_end),
            ci_high: lo_end.max(hi_end),
        });
    }
    Ok(records)
}

/// Log time derivative of a positive year-indexed series: the mean of
/// forward and backward differences in the interior, one-sided at the
/// sample edges.
pub fn log_time_derivative(series: &[(i32, f64)]) -> Result<Vec<(i32, f64)>> {
    if series.len() < 3 {
        return Err(Error::Validation(format!(
            "need at least 3 consecutive years, got {}",
            series.len()
        )));
    }
    let mut missing = Vec::new();
    for pair in series.windows(2) {
        let (y0, y1) = (pair[0].0, pair[1].0);
        if y1 != y0 + 1 {
            missing.extend(y0 + 1..y1);
        }
    }
    if !missing.is_empty() {
        return Err(Error::Gap { series: "time series".into(), missing });
    }
    let logs: Vec<f64> = series
        .iter()
        .map(|&(year, v)| {
            if v > 0.0 && v.is_finite() {
                Ok(v.ln())
            } else {
                Err(Error::Domain(format!("non-positive value {v} at year {year}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let n = logs.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = if i == 0 {
            logs[1] - logs[0]
        } else if i == n - 1 {
            logs[n - 1] - logs[n - 2]
        } else {
            0.5 * (logs[i + 1] - logs[i - 1])
        };
        out.push((series[i].0, d));
    }
    Ok(out)
}

/// Per-year decomposition terms, before time averaging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YearComponents {
    pub year: i32,
    pub tfp_term: f64,
    pub labor_share_term: f64,
    pub capital_term: f64,
    pub observed: f64,
}

/// Per-year component series for one country's rows at slope `alpha1`.
pub fn component_series(rows: &[PanelObservation], alpha1: f64) -> Result<Vec<YearComponents>> {
    let collect = |f: &dyn Fn(&PanelObservation) -> f64| -> Vec<(i32, f64)> {
        rows.iter().map(|r| (r.year, f(r))).collect()
    };
    let d_tfp = log_time_derivative(&collect(&|r| r.tfp))?;
    let d_share = log_time_derivative(&collect(&|r| r.labor_share))?;
    let d_k = log_time_derivative(&collect(&|r| r.k_ratio()))?;
    let d_wage = log_time_derivative(&collect(&|r| r.wage()))?;

    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let (lambda, k) = (row.labor_share, row.k_ratio());
        let share_bracket = wage_share_elasticity(lambda, k, alpha1)?.net;
        out.push(YearComponents {
            year: row.year,
            tfp_term: d_tfp[i].1,
            labor_share_term: d_share[i].1 * share_bracket,
            capital_term: d_k[i].1 * capital_deepening_bracket(lambda, k, alpha1),
            observed: d_wage[i].1,
        });
    }
    Ok(out)
}

/// Time-averaged decomposition of observed wage growth. `label` is the
/// country code, or a pool name for aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthDecomposition {
    pub label: String,
    /// Mean `d ln A / dt` (per year).
    pub tfp_component: f64,
    /// Mean labor-share channel (per year).
    pub labor_share_component: f64,
    /// Mean capital-deepening channel (per year).
    pub capital_deepening_component: f64,
    /// Mean observed `d ln w / dt` (per year).
    pub observed_growth: f64,
    /// Component sum minus observed growth.
    pub residual: f64,
    /// Labor-share component as a percentage of observed growth.
    pub labor_share_pct_of_observed: f64,
}

impl GrowthDecomposition {
    fn from_series(label: String, series: &[YearComponents]) -> Self {
        let n = series.len() as f64;
        let tfp = series.iter().map(|c| c.tfp_term).sum::<f64>() / n;
        let share = series.iter().map(|c| c.labor_share_term).sum::<f64>() / n;
        let capital = series.iter().map(|c| c.capital_term).sum::<f64>() / n;
        let observed = series.iter().map(|c| c.observed).sum::<f64>() / n;
        Self {
            label,
            tfp_component: tfp,
            labor_share_component: share,
            capital_deepening_component: capital,
            observed_growth: observed,
            residual: (tfp + share + capital) - observed,
            labor_share_pct_of_observed: share / observed * 100.0,
        }
    }
}

/// Decompose one country's observed wage growth at slope `alpha1`.
pub fn decompose_growth(rows: &[PanelObservation], alpha1: f64) -> Result<GrowthDecomposition> {
    if rows.is_empty() {
        return Err(Error::Validation("no rows to decompose".into()));
    }
    let country = rows[0].country;
    let series = component_series(rows, alpha1)?;
    Ok(GrowthDecomposition::from_series(country.code().to_string(), &series))
}

/// Decompose the pooled countries: each country's series is differentiated
/// on its own years, then every country-year observation enters the average
/// with equal weight.
pub fn decompose_growth_pooled(
    panel: &Panel,
    countries: &[Country],
    alpha1: f64,
    label: &str,
) -> Result<GrowthDecomposition> {
    let mut all = Vec::new();
    for &country in countries {
        let rows = panel.country_rows(country);
        if rows.is_empty() {
            return Err(Error::Validation(format!("{country} has no rows in the panel")));
        }
        all.extend(component_series(rows, alpha1)?);
    }
    Ok(GrowthDecomposition::from_series(label.to_string(), &all))
}

/// Format a float with nine significant digits, shortest form.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("round-trip of formatted float");
    format!("{rounded}")
}

/// Write the elasticity table CSV (one row per country, ordered by net
/// effect ascending).
pub fn write_elasticity_csv(records: &[ElasticityRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Validation("no elasticity records to write".into()));
    }
    let mut sorted: Vec<&ElasticityRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.mean_net.total_cmp(&b.mean_net));
    let mut out = String::from("country,direct,indirect,net,ci_low,ci_high\n");
    for r in sorted {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.country,
            sig9(r.mean_direct),
            sig9(r.mean_indirect),
            sig9(r.mean_net),
            sig9(r.ci_low),
            sig9(r.ci_high),
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Write the growth-decomposition CSV in the caller's row order.
pub fn write_decomposition_csv(rows: &[GrowthDecomposition], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Validation("no decomposition rows to write".into()));
    }
    let mut out = String::from("country,tfp,labor_share,capital,observed,residual\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.label,
            sig9(r.tfp_component),
            sig9(r.labor_share_component),
            sig9(r.capital_deepening_component),
            sig9(r.observed_growth),
            sig9(r.residual),
        ));
    }
    write_atomic(path, out.as_bytes())
}
