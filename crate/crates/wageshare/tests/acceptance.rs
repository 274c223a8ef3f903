//! Acceptance suite: every headline number the toolkit is expected to
//! reproduce from the checked-in fixture panel, plus the solver and
//! estimator soundness gates. One pass/fail line per criterion (run with
//! `cargo test --test acceptance -- --nocapture` to see them).

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wageshare::analysis::{
    decompose_growth, decompose_growth_pooled, elasticity_table, wage_share_elasticity,
};
use wageshare::dataio::{read_panel, Country, Panel, PanelObservation};
use wageshare::econometrics::{
    build_design, fit_group, ols_fit, CovarianceEstimator, FitGroup,
};
use wageshare::prodfn::{
    ces_intensive, foc_sign_changes, solve_lambda_star, taylor_log_output, ProductionFamily,
    DEFAULT_FOC_TOLERANCE,
};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load_panel() -> Panel {
    read_panel(&fixture("panel.csv")).expect("fixture panel loads")
}

fn check(criterion: &str, ok: bool, detail: String) {
    println!("ACCEPTANCE {criterion}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion} failed: {detail}");
}

#[test]
fn criterion_1_table2_us() {
    let panel = load_panel();
    let start = Instant::now();
    let fit = fit_group(&panel, FitGroup::Us).unwrap();
    let elapsed = start.elapsed();
    let ok = (fit.alpha0 - 1.366).abs() <= 0.02
        && (fit.alpha1 - 0.087).abs() <= 0.005
        && (fit.sigma_hat - 0.920).abs() <= 0.005
        && (fit.r_squared - 0.228).abs() <= 0.01
        && fit.n_obs == 65
        && elapsed.as_secs_f64() < 1.0;
    check(
        "1 table2-us",
        ok,
        format!(
            "alpha0={:.4} alpha1={:.4} sigma={:.4} R2={:.4} N={} in {:.0} ms",
            fit.alpha0,
            fit.alpha1,
            fit.sigma_hat,
            fit.r_squared,
            fit.n_obs,
            elapsed.as_secs_f64() * 1e3
        ),
    );
}

#[test]
fn criterion_2_table2_pool() {
    let panel = load_panel();
    let start = Instant::now();
    let fit = fit_group(&panel, FitGroup::Pool).unwrap();
    let elapsed = start.elapsed();
    let ok = (fit.alpha0 - 0.205).abs() <= 0.05
        && (fit.alpha1 - 0.392).abs() <= 0.03
        && (fit.sigma_hat - 0.719).abs() <= 0.02
        && fit.n_obs == 323
        && fit.covariance_estimator == CovarianceEstimator::Cr1
        && elapsed.as_secs_f64() < 1.0;
    check(
        "2 table2-pool",
        ok,
        format!(
            "alpha0={:.4} alpha1={:.4} sigma={:.4} N={} cov={:?} in {:.0} ms",
            fit.alpha0,
            fit.alpha1,
            fit.sigma_hat,
            fit.n_obs,
            fit.covariance_estimator,
            elapsed.as_secs_f64() * 1e3
        ),
    );
}

#[test]
fn criterion_3_figure2_elasticity() {
    let panel = load_panel();
    let us_fit = fit_group(&panel, FitGroup::Us).unwrap();
    let pool_fit = fit_group(&panel, FitGroup::Pool).unwrap();
    let records = elasticity_table(&panel, &us_fit, &pool_fit).unwrap();

    let us = records.iter().find(|r| r.country == Country::Us).unwrap();
    let us_minus_net = -us.mean_net;
    let implied_se = us.implied_se();
    let se_consistent = implied_se >= 0.040 / 1.5 && implied_se <= 0.040 * 1.5;

    let all_positive = records.iter().all(|r| -r.mean_net > 0.0);
    let min = records.iter().min_by(|a, b| (-a.mean_net).total_cmp(&(-b.mean_net))).unwrap();
    let max = records.iter().max_by(|a, b| (-a.mean_net).total_cmp(&(-b.mean_net))).unwrap();

    let ok = (us_minus_net - 2.40).abs() <= 0.05
        && se_consistent
        && all_positive
        && min.country == Country::It
        && max.country == Country::Dk;
    check(
        "3 figure2-elasticity",
        ok,
        format!(
            "US -net={us_minus_net:.4} implied SE={implied_se:.4} min={} max={} all_positive={}",
            min.country, max.country, all_positive
        ),
    );
}

#[test]
fn criterion_4_figure3_decomposition() {
    let panel = load_panel();
    let us_fit = fit_group(&panel, FitGroup::Us).unwrap();
    let pool_fit = fit_group(&panel, FitGroup::Pool).unwrap();

    let us = decompose_growth(panel.country_rows(Country::Us), us_fit.alpha1).unwrap();
    let us_resid_pct = 100.0 * (us.residual / us.observed_growth).abs();
    let pool =
        decompose_growth_pooled(&panel, &Country::POOL, pool_fit.alpha1, "POOL").unwrap();
    let pool_resid_pct = 100.0 * (pool.residual / pool.observed_growth).abs();

    let ok = (us.labor_share_pct_of_observed - 15.7).abs() <= 1.5
        && us_resid_pct <= 1.5
        && (pool.labor_share_pct_of_observed - (-6.1)).abs() <= 1.5
        && pool_resid_pct <= 2.5;
    check(
        "4 figure3-decomposition",
        ok,
        format!(
            "US labor%={:.2} |resid|={:.2}% of observed; pool labor%={:.2} |resid|={:.2}%",
            us.labor_share_pct_of_observed,
            us_resid_pct,
            pool.labor_share_pct_of_observed,
            pool_resid_pct
        ),
    );
}

#[test]
fn criterion_5_theorem_property_suite() {
    let start = Instant::now();
    let labor = 3.7;
    let mut max_lambda_dev = 0.0_f64;
    let mut max_wage_dev = 0.0_f64;
    let mut unique = true;
    for sigma in [0.7, 0.92, 1.2] {
        let family = ProductionFamily::ces(sigma, 1.0).unwrap();
        for k in [1.0, 10.0, 100.0, 1000.0] {
            let base = solve_lambda_star(k, &family, DEFAULT_FOC_TOLERANCE).unwrap();
            if base.is_interior && base.soc_satisfied {
                unique &= foc_sign_changes(k, &family) == 1;
            }
            for scale in [0.1, 1.0, 10.0, 100.0] {
                // Fresh (K, L) pair at the same ratio: L scaled, K rebuilt.
                let scaled_labor = labor * scale;
                let scaled_capital = k * scaled_labor;
                let ratio = scaled_capital / scaled_labor;
                let scaled = solve_lambda_star(ratio, &family, DEFAULT_FOC_TOLERANCE).unwrap();
                max_lambda_dev = max_lambda_dev.max((scaled.lambda_star - base.lambda_star).abs());
                max_wage_dev = max_wage_dev
                    .max(((scaled.wage_star - base.wage_star) / base.wage_star).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = max_lambda_dev < 1e-8 && max_wage_dev < 1e-8 && unique && elapsed.as_secs() < 10;
    check(
        "5 theorem-properties",
        ok,
        format!(
            "max lambda dev={max_lambda_dev:.2e} max wage rel dev={max_wage_dev:.2e} \
             unique={unique} in {:.0} ms",
            elapsed.as_secs_f64() * 1e3
        ),
    );
}

#[test]
fn criterion_6_solver_matches_brute_force() {
    // 50 randomized CES parameterizations against a 10^6-point grid search.
    let mut rng = ChaCha8Rng::seed_from_u64(90210);
    let grid_points = 1_000_000usize;
    let mut worst_lambda = 0.0_f64;
    let mut worst_wage = 0.0_f64;
    for _ in 0..50 {
        let sigma = loop {
            let s: f64 = rng.gen_range(0.5..1.5);
            if (s - 1.0).abs() > 0.02 {
                break s;
            }
        };
        let k = 10f64.powf(rng.gen_range(-1.0..3.0));
        let tfp = rng.gen_range(0.5..2.0);
        let family = ProductionFamily::ces(sigma, tfp).unwrap();

        let mut best_lambda = 1.0;
        let mut best_wage = family.output_per_hour(k, 1.0);
        for i in 1..=grid_points {
            let lambda = i as f64 / grid_points as f64;
            let w = lambda * family.output_per_hour(k, lambda);
            if w > best_wage {
                best_wage = w;
                best_lambda = lambda;
            }
        }
        let solved = solve_lambda_star(k, &family, DEFAULT_FOC_TOLERANCE).unwrap();
        worst_lambda = worst_lambda.max((solved.lambda_star - best_lambda).abs());
        worst_wage =
            worst_wage.max(((solved.wage_star - best_wage) / best_wage).abs());
    }
    let ok = worst_lambda < 1e-4 && worst_wage < 1e-8;
    check(
        "6 oracle-equivalence",
        ok,
        format!("worst |lambda dev|={worst_lambda:.2e} worst wage rel dev={worst_wage:.2e}"),
    );
}

/// Panel row generated exactly from the fitted relation.
fn synth_row(year: i32, lambda: f64, k: f64, alpha0: f64, alpha1: f64, noise: f64) -> PanelObservation {
    let hours = 100.0;
    let ln_k = k.ln();
    let z = 0.5 * lambda * (1.0 - lambda) * ln_k * ln_k;
    let output = hours * (alpha0 + (1.0 - lambda) * ln_k + alpha1 * z + noise).exp();
    PanelObservation::new(Country::Us, year, output, hours, k * hours, 1.0, lambda).unwrap()
}

#[test]
fn criterion_7_estimator_soundness() {
    let start = Instant::now();

    // Zero-noise recovery to 1e-10.
    let rows: Vec<PanelObservation> = (0..65)
        .map(|i| {
            let lambda = 0.55 + 0.003 * i as f64;
            let k = 60.0 + 4.0 * i as f64;
            synth_row(1955 + i, lambda, k, 1.366, 0.087, 0.0)
        })
        .collect();
    let (dep, design) = build_design(&rows).unwrap();
    let exact = ols_fit(&dep, &design, &vec![0; rows.len()]).unwrap();
    let recovered =
        (exact.alpha0 - 1.366).abs() < 1e-10 && (exact.alpha1 - 0.087).abs() < 1e-10;

    // Monte-Carlo coverage of 95% intervals across 1000 replications.
    let mut rng = ChaCha8Rng::seed_from_u64(8675309);
    let replications = 1000;
    let mut covered = 0usize;
    let truth = 0.087;
    for _ in 0..replications {
        let rows: Vec<PanelObservation> = (0..65)
            .map(|i| {
                let lambda = 0.55 + 0.003 * i as f64;
                let k = 60.0 + 4.0 * i as f64;
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                let noise =
                    0.06 * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                synth_row(1955 + i, lambda, k, 1.366, truth, noise)
            })
            .collect();
        let (dep, design) = build_design(&rows).unwrap();
        let fit = ols_fit(&dep, &design, &vec![0; rows.len()]).unwrap();
        if (fit.alpha1 - truth).abs() <= 1.96 * fit.se_alpha1 {
            covered += 1;
        }
    }
    let coverage = covered as f64 / replications as f64;
    let elapsed = start.elapsed();

    let ok = recovered && (0.92..=0.98).contains(&coverage) && elapsed.as_secs() < 30;
    check(
        "7 estimator-soundness",
        ok,
        format!(
            "zero-noise recovery={recovered} coverage={coverage:.3} in {:.1} s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_8_derivative_identities() {
    // Share elasticity vs central differences of the fitted log wage on a
    // 100-point grid.
    let alpha1 = 0.25;
    let fitted_ln_w = |lambda: f64, ln_k: f64| {
        lambda.ln() + (1.0 - lambda) * ln_k + 0.5 * alpha1 * lambda * (1.0 - lambda) * ln_k * ln_k
    };
    let h = 1e-6;
    let mut worst_grad = 0.0_f64;
    for i in 0..10 {
        let lambda = 0.08 + 0.09 * i as f64;
        for j in 0..10 {
            let ln_k = 0.3 + 0.72 * j as f64;
            let numeric = lambda * (fitted_ln_w(lambda + h, ln_k) - fitted_ln_w(lambda - h, ln_k))
                / (2.0 * h);
            let analytic = wage_share_elasticity(lambda, ln_k.exp(), alpha1).unwrap().net;
            worst_grad = worst_grad.max((numeric - analytic).abs());
        }
    }

    // Taylor form converges to the exact intensive form near sigma = 1.
    let mut worst_taylor = 0.0_f64;
    for sigma in [1.0 - 1e-3, 1.0 + 1e-3] {
        for k in [1.0, 2.0, 5.0, 10.0, 20.0, 30.0] {
            for lambda in [0.15, 0.3, 0.5, 0.7, 0.85] {
                let taylor = taylor_log_output(k, lambda, sigma, 1.0).unwrap();
                let exact = ces_intensive(k, lambda, sigma, 1.0).unwrap().ln();
                worst_taylor = worst_taylor.max((taylor - exact).abs());
            }
        }
    }

    let ok = worst_grad < 1e-8 && worst_taylor < 1e-6;
    check(
        "8 derivative-identities",
        ok,
        format!("worst gradient gap={worst_grad:.2e} worst Taylor gap={worst_taylor:.2e}"),
    );
}
