//! Solver for the wage-maximizing labor share.
//!
//! Interior candidates are the roots of the first-order condition
//! `g(lambda) = 1/lambda + d ln y / d lambda = 0`. The solver scans a
//! uniform grid for sign changes, refines each bracket by bisection, checks
//! the second-order condition, and compares the surviving candidate wages
//! against the boundary wage at `lambda = 1`. (`lambda = 0` is excluded:
//! the wage vanishes there and can never maximize.)

use crate::error::{Error, Result};
use crate::prodfn::family::ProductionFamily;

/// Width of the scan grid over `[SCAN_EPS, 1 - SCAN_EPS]`.
const SCAN_POINTS: usize = 1000;
const SCAN_EPS: f64 = 1e-6;
const MAX_BISECTIONS: usize = 200;

/// Outcome of the wage-maximization solve at a fixed capital-labor ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaStarResult {
    /// Wage-maximizing labor share, in `(0, 1]`.
    pub lambda_star: f64,
    /// Maximum wage `lambda_star * y(k, lambda_star)`.
    pub wage_star: f64,
    /// True when an interior critical point beats the boundary wage `w(1)`.
    pub is_interior: bool,
    /// True when `d^2 ln y / d lambda^2 < 0` at the returned critical point.
    pub soc_satisfied: bool,
    /// Total bisection iterations spent refining brackets.
    pub iterations: usize,
}

/// Find the labor share maximizing `w = lambda * y(k, lambda)`.
///
/// `foc_tolerance` bounds `|g(lambda)|` at accepted interior roots;
/// bisection is used because it converges unconditionally on a bracket.
pub fn solve_lambda_star(
    k: f64,
    family: &ProductionFamily,
    foc_tolerance: f64,
) -> Result<LambdaStarResult> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("capital-labor ratio must be positive, got {k}")));
    }
    if !(foc_tolerance > 0.0) {
        return Err(Error::Domain(format!(
            "FOC tolerance must be positive, got {foc_tolerance}"
        )));
    }

    let g = |lambda: f64| 1.0 / lambda + family.dlog_output_dshare(k, lambda);

    // Scan for sign changes of the first-order condition.
    let lo = SCAN_EPS;
    let hi = 1.0 - SCAN_EPS;
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut brackets = Vec::new();
    let mut prev_lambda = lo;
    let mut prev_g = g(lo);
    if !prev_g.is_finite() {
        return Err(Error::Numeric(format!(
            "first-order condition is not finite at lambda = {lo}"
        )));
    }
    for i in 1..SCAN_POINTS {
        let lambda = lo + step * i as f64;
        let cur_g = g(lambda);
        if !cur_g.is_finite() {
            return Err(Error::Numeric(format!(
                "first-order condition is not finite at lambda = {lambda}"
            )));
        }
        if prev_g == 0.0 {
            brackets.push((prev_lambda, prev_lambda));
        } else if prev_g * cur_g < 0.0 {
            brackets.push((prev_lambda, lambda));
        }
        prev_lambda = lambda;
        prev_g = cur_g;
    }
    if prev_g == 0.0 {
        brackets.push((prev_lambda, prev_lambda));
    }

    let mut iterations = 0usize;
    let mut best_interior: Option<(f64, f64, bool)> = None; // (lambda, wage, soc)
    for (mut a, mut b) in brackets {
        let root = if a == b {
            a
        } else {
            let mut ga = g(a);
            let mut mid = 0.5 * (a + b);
            for _ in 0..MAX_BISECTIONS {
                mid = 0.5 * (a + b);
                let gm = g(mid);
                iterations += 1;
                if gm.abs() < foc_tolerance || (b - a) < 1e-15 {
                    break;
                }
                if ga * gm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    ga = gm;
                }
            }
            mid
        };
        let w = root * family.output_per_hour(k, root);
        if !w.is_finite() {
            return Err(Error::Numeric(format!("wage is not finite at lambda = {root}")));
        }
        let soc = family.d2log_output_dshare2(k, root) < 0.0;
        let better = match best_interior {
            Some((_, best_w, _)) => w > best_w,
            None => true,
        };
        if better {
            best_interior = Some((root, w, soc));
        }
    }

    let boundary_wage = family.output_per_hour(k, 1.0);
    if !boundary_wage.is_finite() {
        return Err(Error::Numeric("boundary wage w(1) is not finite".into()));
    }

    match best_interior {
        Some((lambda, w, soc)) if w > boundary_wage => Ok(LambdaStarResult {
            lambda_star: lambda,
            wage_star: w,
            is_interior: true,
            soc_satisfied: soc,
            iterations,
        }),
        _ => Ok(LambdaStarResult {
            lambda_star: 1.0,
            wage_star: boundary_wage,
            is_interior: false,
            soc_satisfied: false,
            iterations,
        }),
    }
}

/// Count the sign changes of the first-order condition on the scan grid.
/// Used by the uniqueness property of the theorem verification suite.
pub fn foc_sign_changes(k: f64, family: &ProductionFamily) -> usize {
    let lo = SCAN_EPS;
    let hi = 1.0 - SCAN_EPS;
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let g = |lambda: f64| 1.0 / lambda + family.dlog_output_dshare(k, lambda);
    let mut count = 0;
    let mut prev = g(lo);
    for i in 1..SCAN_POINTS {
        let cur = g(lo + step * i as f64);
        if prev * cur < 0.0 {
            count += 1;
        }
        prev = cur;
    }
    count
}
