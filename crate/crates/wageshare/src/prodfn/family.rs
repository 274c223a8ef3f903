//! Evaluable families of constant-returns production functions.
//!
//! A family fixes the technology and leaves the labor share `lambda` free,
//! exposing per-hour output `y(k, lambda) = Y(k, 1, lambda)` together with
//! its log-derivatives in `lambda`. Constant returns to scale is what makes
//! the per-hour form sufficient: the wage is `w = lambda * y(k, lambda)`.

use crate::error::{Error, Result};
use crate::prodfn::ces::ces_intensive_unchecked;

type EvalFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A production family `y(k, lambda)` with analytic first log-derivative in
/// `lambda` and an optional analytic second log-derivative. When the second
/// derivative is absent a central-difference fallback is used.
pub struct ProductionFamily {
    output: EvalFn,
    dlog_output: EvalFn,
    d2log_output: Option<EvalFn>,
}

impl ProductionFamily {
    /// Build a family from its per-hour output and analytic
    /// `d ln y / d lambda`. The evaluator must be positive and smooth for
    /// `k > 0`, `lambda` in `(0, 1)`, and evaluable at `lambda = 1`.
    pub fn new(
        output: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        dlog_output: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            output: Box::new(output),
            dlog_output: Box::new(dlog_output),
            d2log_output: None,
        }
    }

    /// Attach an analytic `d^2 ln y / d lambda^2`.
    pub fn with_second_derivative(
        mut self,
        d2log_output: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.d2log_output = Some(Box::new(d2log_output));
        self
    }

    /// CES family in intensive form, `y = A (lambda + (1-lambda) k^x)^(1/x)`
    /// with `x = (1 - sigma)/sigma`; `sigma = 1` is the Cobb-Douglas limit
    /// `y = A k^(1-lambda)`.
    pub fn ces(sigma: f64, tfp: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!(
                "elasticity of substitution must be positive, got {sigma}"
            )));
        }
        if !(tfp > 0.0) || !tfp.is_finite() {
            return Err(Error::Domain(format!("TFP level must be positive, got {tfp}")));
        }
        if sigma == 1.0 {
            // ln y = ln A + (1 - lambda) ln k.
            return Ok(Self::new(
                move |k, lambda| tfp * k.powf(1.0 - lambda),
                move |k, _| -k.ln(),
            )
            .with_second_derivative(|_, _| 0.0));
        }
        let x = (1.0 - sigma) / sigma;
        Ok(Self::new(
            move |k, lambda| ces_intensive_unchecked(k, lambda, sigma, tfp),
            move |k, lambda| {
                let kx = k.powf(x);
                (1.0 - kx) / (x * (lambda + (1.0 - lambda) * kx))
            },
        )
        .with_second_derivative(move |k, lambda| {
            let kx = k.powf(x);
            let bracket = lambda + (1.0 - lambda) * kx;
            -(1.0 - kx) * (1.0 - kx) / (x * bracket * bracket)
        }))
    }

    /// Exponential family `y = A e^(-c lambda)`, independent of `k`. Its
    /// first-order condition has the closed-form root `lambda = 1/c`.
    pub fn exponential(tfp: f64, decay: f64) -> Self {
        Self::new(move |_, lambda| tfp * (-decay * lambda).exp(), move |_, _| -decay)
            .with_second_derivative(|_, _| 0.0)
    }

    /// Per-hour output `y(k, lambda)`.
    pub fn output_per_hour(&self, k: f64, lambda: f64) -> f64 {
        (self.output)(k, lambda)
    }

    /// `d ln y / d lambda` at `(k, lambda)`.
    pub fn dlog_output_dshare(&self, k: f64, lambda: f64) -> f64 {
        (self.dlog_output)(k, lambda)
    }

    /// `d^2 ln y / d lambda^2` at `(k, lambda)`, analytic when available,
    /// otherwise the central-difference fallback.
    pub fn d2log_output_dshare2(&self, k: f64, lambda: f64) -> f64 {
        if let Some(d2) = &self.d2log_output {
            return d2(k, lambda);
        }
        self.second_derivative_fallback(k, lambda)
    }

    pub fn has_analytic_second_derivative(&self) -> bool {
        self.d2log_output.is_some()
    }

    /// Central difference of the first derivative with step
    /// `h = 1e-5 * max(lambda, 1e-3)`, clamped so `lambda +- h` stays in
    /// `(0, 1)`.
    pub fn second_derivative_fallback(&self, k: f64, lambda: f64) -> f64 {
        let mut h = 1e-5 * lambda.max(1e-3);
        h = h.min(0.5 * lambda).min(0.5 * (1.0 - lambda));
        ((self.dlog_output)(k, lambda + h) - (self.dlog_output)(k, lambda - h)) / (2.0 * h)
    }
}

impl std::fmt::Debug for ProductionFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductionFamily")
            .field("analytic_second_derivative", &self.d2log_output.is_some())
            .finish()
    }
}

/// Wage at labor share `lambda` and capital-labor ratio `k`:
/// `w = lambda * y(k, lambda)`, extended by continuity to `w(0) = 0`.
pub fn wage(lambda: f64, k: f64, family: &ProductionFamily) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("capital-labor ratio must be positive, got {k}")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("labor share must lie in [0, 1], got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(lambda * family.output_per_hour(k, lambda))
}

/// `d ln w / d lambda = 1/lambda + d ln y / d lambda`. The direct effect
/// `1/lambda` is always positive; the output channel may offset it.
pub fn dlogw_dlambda(lambda: f64, k: f64, family: &ProductionFamily) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("capital-labor ratio must be positive, got {k}")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!(
            "labor share must lie in (0, 1), got {lambda} (1/lambda has a pole at 0)"
        )));
    }
    Ok(1.0 / lambda + family.dlog_output_dshare(k, lambda))
}
