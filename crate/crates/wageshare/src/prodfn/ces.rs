//! Constant elasticity of substitution production function and the
//! closed forms derived from it.

use crate::error::{Error, Result};

/// Parameters of a CES production function
/// `Y = A (alpha K^rho + (1 - alpha) L^rho)^(1/rho)`.
///
/// `alpha` is the capital share of *tasks* inside the aggregator, not the
/// capital share of output. `sigma` is the elasticity of substitution
/// between capital and labor; `sigma = 1` selects the Cobb-Douglas limit
/// `Y = A K^alpha L^(1-alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CesParams {
    tfp: f64,
    alpha: f64,
    sigma: f64,
}

impl CesParams {
    pub fn new(tfp: f64, alpha: f64, sigma: f64) -> Result<Self> {
        if !(tfp > 0.0) || !tfp.is_finite() {
            return Err(Error::Domain(format!("TFP level must be positive, got {tfp}")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!(
                "elasticity of substitution must be positive, got {sigma}"
            )));
        }
        Ok(Self { tfp, alpha, sigma })
    }

    pub fn tfp(&self) -> f64 {
        self.tfp
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Exponent `rho = (sigma - 1) / sigma`, so that `sigma = 1 / (1 - rho)`.
    pub fn rho(&self) -> f64 {
        (self.sigma - 1.0) / self.sigma
    }

    fn is_cobb_douglas(&self) -> bool {
        self.sigma == 1.0
    }
}

/// CES output for capital `K` and labor `L`.
///
/// Routes to the Cobb-Douglas limit when `sigma = 1`; the exponent `1/rho`
/// is singular there and the limit is known in closed form.
pub fn ces_output(capital: f64, labor: f64, p: &CesParams) -> Result<f64> {
    if !(capital > 0.0) {
        return Err(Error::Domain(format!("capital must be positive, got {capital}")));
    }
    if !(labor > 0.0) {
        return Err(Error::Domain(format!("labor must be positive, got {labor}")));
    }
    if p.is_cobb_douglas() {
        return Ok(p.tfp * capital.powf(p.alpha) * labor.powf(1.0 - p.alpha));
    }
    let rho = p.rho();
    let bracket = p.alpha * capital.powf(rho) + (1.0 - p.alpha) * labor.powf(rho);
    Ok(p.tfp * bracket.powf(1.0 / rho))
}

/// Intensive-form CES output per labor hour at capital-labor ratio `k` and
/// labor share `lambda`:
/// `y = A (lambda + (1 - lambda) k^x)^(1/x)` with `x = (1 - sigma) / sigma`.
///
/// `sigma = 1` routes to the Cobb-Douglas limit `y = A k^(1-lambda)`.
pub fn ces_intensive(k: f64, lambda: f64, sigma: f64, tfp: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("capital-labor ratio must be positive, got {k}")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("labor share must lie in (0, 1), got {lambda}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!(
            "elasticity of substitution must be positive, got {sigma}"
        )));
    }
    Ok(ces_intensive_unchecked(k, lambda, sigma, tfp))
}

/// Same as [`ces_intensive`] without domain checks; used by production
/// families that must evaluate on the closed interval `lambda` in `[0, 1]`.
pub(crate) fn ces_intensive_unchecked(k: f64, lambda: f64, sigma: f64, tfp: f64) -> f64 {
    if sigma == 1.0 {
        return tfp * k.powf(1.0 - lambda);
    }
    let x = (1.0 - sigma) / sigma;
    let bracket = lambda + (1.0 - lambda) * k.powf(x);
    tfp * bracket.powf(1.0 / x)
}

/// Labor share implied by the CES task-share parameter at capital-labor
/// ratio `k`: `lambda = (1 - alpha) / (alpha k^rho + (1 - alpha))`.
pub fn lambda_from_alpha(alpha: f64, k: f64, rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if !(k > 0.0) {
        return Err(Error::Domain(format!("capital-labor ratio must be positive, got {k}")));
    }
    // alpha = 1 is pure-capital technology; k^rho may overflow or vanish
    // there, but the share is identically zero.
    if alpha == 1.0 {
        return Ok(0.0);
    }
    Ok((1.0 - alpha) / (alpha * k.powf(rho) + (1.0 - alpha)))
}

/// Second-order Taylor expansion of the log intensive form around
/// `x = (1 - sigma) / sigma = 0`:
/// `ln y = ln A + (1 - lambda) ln k + (1/2) (1 - lambda) lambda (ln k)^2 x`.
///
/// The expansion is only accurate for `sigma` near one; a warning is logged
/// when `|x| > 1` (i.e. `sigma < 1/2`), where the series degrades.
pub fn taylor_log_output(k: f64, lambda: f64, sigma: f64, tfp: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("capital-labor ratio must be positive, got {k}")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("labor share must lie in (0, 1), got {lambda}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!(
            "elasticity of substitution must be positive, got {sigma}"
        )));
    }
    if !(tfp > 0.0) {
        return Err(Error::Domain(format!("TFP level must be positive, got {tfp}")));
    }
    let x = (1.0 - sigma) / sigma;
    if x.abs() > 1.0 {
        log::warn!(
            "Taylor expansion requested at sigma = {sigma} (|x| = {:.3} > 1); \
             the truncated series is a poor approximation this far from sigma = 1",
            x.abs()
        );
    }
    let ln_k = k.ln();
    Ok(tfp.ln() + (1.0 - lambda) * ln_k + 0.5 * (1.0 - lambda) * lambda * ln_k * ln_k * x)
}
