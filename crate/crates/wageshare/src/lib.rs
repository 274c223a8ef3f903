//! Wage and labor-share analysis toolkit.
//!
//! The crate is organized around four concerns:
//!
//! - [`prodfn`] — constant-returns production families, the wage identity
//!   `w = lambda * Y(k, 1, lambda)`, and the solver for the wage-maximizing
//!   labor share (which depends only on the capital-labor ratio).
//! - [`dataio`] — ingestion of FRED and KLEMS-style national-accounts
//!   extracts into a canonical country-year panel.
//! - [`econometrics`] — the output-per-hour regression that backs out the
//!   elasticity of substitution, with country-clustered standard errors.
//! - [`analysis`] — the wage elasticity of the labor share and the
//!   three-way decomposition of observed wage growth.

pub mod analysis;
pub mod dataio;
pub mod econometrics;
pub mod error;
pub mod prodfn;

pub use error::{Error, Result};
