//! Command-line front end: ingestion, fitting, elasticity and growth
//! tables, the labor-share solver, and the scale-invariance check.
//!
//! Exit codes: 0 success, 2 input/validation, 3 numerical rank failure,
//! 4 domain error, 5 property violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wageshare::analysis::{
    decompose_growth, decompose_growth_pooled, elasticity_table, write_decomposition_csv,
    write_elasticity_csv, GrowthDecomposition,
};
use wageshare::dataio::{
    build_panel, read_panel, write_panel, Country, FredClient, Panel,
};
use wageshare::econometrics::{fit_group, FitArtifact, FitGroup, FitResult};
use wageshare::prodfn::{
    foc_sign_changes, lambda_from_alpha, solve_lambda_star, CesParams, ProductionFamily,
    DEFAULT_FOC_TOLERANCE,
};
use wageshare::Error;

#[derive(Parser)]
#[command(
    name = "wageshare",
    about = "Wage and labor-share analysis on country panels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the canonical panel CSV from FRED and KLEMS source files.
    Ingest(IngestArgs),
    /// Download a FRED series as date,value CSV (needs FRED_API_KEY).
    Fetch(FetchArgs),
    /// Fit the output-per-hour regression and write fit JSON artifacts.
    Fit(FitArgs),
    /// Per-country wage elasticity of the labor share with 95% bands.
    Elasticity(ElasticityArgs),
    /// Decompose observed wage growth into TFP, labor-share, and
    /// capital-deepening components.
    Decompose(DecomposeArgs),
    /// Solve for the wage-maximizing labor share of a production family.
    Solve(SolveArgs),
    /// Verify that the solved share and wage depend only on the
    /// capital-labor ratio, across input scalings.
    VerifyTheorem(VerifyArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Directory holding the FRED source CSVs (US series plus Japan TFP).
    #[arg(long, value_name = "DIR")]
    fred_dir: PathBuf,
    /// KLEMS-style extract CSV with the non-US countries.
    #[arg(long, value_name = "FILE")]
    klems: PathBuf,
    /// Output panel CSV path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct FetchArgs {
    /// FRED series id, e.g. GDPC1.
    #[arg(long, value_name = "ID")]
    series: String,
    /// Directory to write <ID>.csv into.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum GroupArg {
    Us,
    Pool,
    Both,
}

#[derive(Args)]
struct FitArgs {
    /// Canonical panel CSV.
    #[arg(long, value_name = "FILE")]
    panel: PathBuf,
    /// Which sample to fit.
    #[arg(long, value_enum, default_value = "both")]
    group: GroupArg,
    /// Directory for fit_us.json / fit_pool.json artifacts.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ElasticityArgs {
    /// Canonical panel CSV.
    #[arg(long, value_name = "FILE")]
    panel: PathBuf,
    /// Output CSV (one row per country, ordered by net effect).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Canonical panel CSV.
    #[arg(long, value_name = "FILE")]
    panel: PathBuf,
    /// Output CSV (per-country rows plus a pooled row).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    /// CES intensive form, parameterized by sigma.
    Ces,
    /// Exponential family y = A exp(-c lambda).
    Exp,
}

#[derive(Args)]
struct SolveArgs {
    /// Production family.
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Capital-labor ratio.
    #[arg(long)]
    k: f64,
    /// Elasticity of substitution (CES family).
    #[arg(long)]
    sigma: Option<f64>,
    /// TFP level.
    #[arg(long = "A", default_value_t = 1.0)]
    tfp: f64,
    /// CES task-share parameter; when given, the implied labor share at k
    /// is printed next to the wage-maximizing one.
    #[arg(long)]
    alpha: Option<f64>,
    /// Decay rate of the exponential family.
    #[arg(long)]
    c: Option<f64>,
    /// Tolerance on the first-order condition residual.
    #[arg(long, default_value_t = DEFAULT_FOC_TOLERANCE)]
    tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Production family.
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Elasticity of substitution (CES family).
    #[arg(long)]
    sigma: Option<f64>,
    /// TFP level.
    #[arg(long = "A", default_value_t = 1.0)]
    tfp: f64,
    /// Decay rate of the exponential family.
    #[arg(long)]
    c: Option<f64>,
    /// Capital-labor ratios to sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
    k_grid: Vec<f64>,
    /// Input scale factors to sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.1,1,10,100")]
    scales: Vec<f64>,
    /// Maximum allowed deviation of lambda* and relative deviation of w*.
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Ingest(args) => cmd_ingest(&args),
        Command::Fetch(args) => cmd_fetch(&args),
        Command::Fit(args) => cmd_fit(&args),
        Command::Elasticity(args) => cmd_elasticity(&args),
        Command::Decompose(args) => cmd_decompose(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::VerifyTheorem(args) => cmd_verify_theorem(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Validation(_)
        | Error::Ingest(_)
        | Error::Gap { .. }
        | Error::Config(_)
        | Error::Fetch { .. }
        | Error::Io(_)
        | Error::Csv(_) => 2,
        Error::Singular(_) => 3,
        Error::Domain(_) | Error::Numeric(_) => 4,
    }
}

fn cmd_ingest(args: &IngestArgs) -> Result<ExitCode, Error> {
    let panel = build_panel(&args.fred_dir, &args.klems)?;
    write_panel(&panel, &args.out)?;

    println!("panel written to {}", args.out.display());
    println!("sha256 {}", panel.content_hash());
    for country in panel.countries() {
        let rows = panel.country_rows(country);
        println!(
            "  {country}: {} rows ({}-{})",
            rows.len(),
            rows.first().map(|r| r.year).unwrap_or_default(),
            rows.last().map(|r| r.year).unwrap_or_default()
        );
    }
    println!("  total: {} rows", panel.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_fetch(args: &FetchArgs) -> Result<ExitCode, Error> {
    let api_key = std::env::var("FRED_API_KEY").unwrap_or_default();
    let client = FredClient::new(&api_key)?;
    let path = client.fetch_to_csv(&args.series, &args.out_dir)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn fit_both(panel: &Panel) -> Result<(FitResult, FitResult), Error> {
    Ok((fit_group(panel, FitGroup::Us)?, fit_group(panel, FitGroup::Pool)?))
}

fn cmd_fit(args: &FitArgs) -> Result<ExitCode, Error> {
    let panel = read_panel(&args.panel)?;
    let groups: &[FitGroup] = match args.group {
        GroupArg::Us => &[FitGroup::Us],
        GroupArg::Pool => &[FitGroup::Pool],
        GroupArg::Both => &[FitGroup::Us, FitGroup::Pool],
    };

    let mut fits = Vec::new();
    for &group in groups {
        let fit = fit_group(&panel, group)?;
        let artifact = FitArtifact::new(group, &panel, fit.clone());
        let out = args.out_dir.join(format!("fit_{}.json", group.label()));
        wageshare::dataio::write_atomic(&out, artifact.to_json().as_bytes())?;
        println!("wrote {}", out.display());
        fits.push((group, fit));
    }

    println!();
    print!("{:<12}", "");
    for (group, _) in &fits {
        print!("{:>12}", group.label());
    }
    println!();
    let row = |name: &str, value: &dyn Fn(&FitResult) -> String| {
        print!("{name:<12}");
        for (_, fit) in &fits {
            print!("{:>12}", value(fit));
        }
        println!();
    };
    row("alpha0", &|f| format!("{:.3}", f.alpha0));
    row("", &|f| format!("({:.3})", f.se_alpha0));
    row("alpha1", &|f| format!("{:.3}", f.alpha1));
    row("", &|f| format!("({:.3})", f.se_alpha1));
    row("sigma", &|f| format!("{:.3}", f.sigma_hat));
    row("", &|f| format!("({:.3})", f.se_sigma_hat));
    row("R2", &|f| format!("{:.3}", f.r_squared));
    row("N", &|f| format!("{}", f.n_obs));
    row("cov", &|f| format!("{:?}", f.covariance_estimator).to_uppercase());
    Ok(ExitCode::SUCCESS)
}

fn cmd_elasticity(args: &ElasticityArgs) -> Result<ExitCode, Error> {
    let panel = read_panel(&args.panel)?;
    let (us_fit, pool_fit) = fit_both(&panel)?;
    let records = elasticity_table(&panel, &us_fit, &pool_fit)?;
    write_elasticity_csv(&records, &args.out)?;
    println!("wrote {}", args.out.display());

    let mut sorted: Vec<_> = records.iter().collect();
    sorted.sort_by(|a, b| b.mean_net.total_cmp(&a.mean_net));
    println!("{:<8}{:>12}{:>24}", "country", "-net", "95% band on -net");
    for r in sorted {
        println!(
            "{:<8}{:>12.3}{:>24}",
            r.country.code(),
            -r.mean_net,
            format!("[{:.3}, {:.3}]", -r.ci_high, -r.ci_low)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_decompose(args: &DecomposeArgs) -> Result<ExitCode, Error> {
    let panel = read_panel(&args.panel)?;
    let (us_fit, pool_fit) = fit_both(&panel)?;

    // Fixed order: US first, then the pool countries, then their aggregate.
    let mut table: Vec<GrowthDecomposition> = Vec::new();
    table.push(decompose_growth(panel.country_rows(Country::Us), us_fit.alpha1)?);
    for country in Country::POOL {
        table.push(decompose_growth(panel.country_rows(country), pool_fit.alpha1)?);
    }
    table.push(decompose_growth_pooled(&panel, &Country::POOL, pool_fit.alpha1, "POOL")?);
    write_decomposition_csv(&table, &args.out)?;
    println!("wrote {}", args.out.display());

    println!(
        "{:<8}{:>10}{:>12}{:>10}{:>12}{:>12}{:>10}",
        "country", "tfp", "labor", "capital", "observed", "residual", "labor%"
    );
    for d in &table {
        println!(
            "{:<8}{:>10.4}{:>12.4}{:>10.4}{:>12.4}{:>12.5}{:>10.1}",
            d.label,
            100.0 * d.tfp_component,
            100.0 * d.labor_share_component,
            100.0 * d.capital_deepening_component,
            100.0 * d.observed_growth,
            100.0 * d.residual,
            d.labor_share_pct_of_observed
        );
    }
    println!("(percent per year; labor% is the labor-share column over observed)");
    Ok(ExitCode::SUCCESS)
}

fn build_family(
    family: FamilyArg,
    sigma: Option<f64>,
    tfp: f64,
    c: Option<f64>,
) -> Result<ProductionFamily, Error> {
    match family {
        FamilyArg::Ces => {
            let sigma = sigma
                .ok_or_else(|| Error::Validation("--sigma is required for --family ces".into()))?;
            ProductionFamily::ces(sigma, tfp)
        }
        FamilyArg::Exp => {
            let c = c.ok_or_else(|| Error::Validation("--c is required for --family exp".into()))?;
            Ok(ProductionFamily::exponential(tfp, c))
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode, Error> {
    let family = build_family(args.family, args.sigma, args.tfp, args.c)?;
    let result = solve_lambda_star(args.k, &family, args.tol)?;
    println!("lambda* = {:.10}", result.lambda_star);
    println!("w*      = {:.10}", result.wage_star);
    println!(
        "location: {}",
        if result.is_interior { "interior critical point" } else { "boundary (lambda = 1)" }
    );
    println!(
        "second-order condition: {}",
        if result.soc_satisfied { "satisfied" } else { "not satisfied" }
    );
    println!("bisection iterations: {}", result.iterations);
    if let (FamilyArg::Ces, Some(alpha), Some(sigma)) = (args.family, args.alpha, args.sigma) {
        let params = CesParams::new(args.tfp, alpha, sigma)?;
        let implied = lambda_from_alpha(alpha, args.k, params.rho())?;
        println!("labor share implied by alpha = {alpha} at k = {}: {implied:.10}", args.k);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_theorem(args: &VerifyArgs) -> Result<ExitCode, Error> {
    let family = build_family(args.family, args.sigma, args.tfp, args.c)?;
    // Fixed labor input; any positive value works since only the ratio can
    // matter. 3.7 keeps the scaled products from being exact powers of two.
    let labor = 3.7;
    let mut max_lambda_dev = 0.0_f64;
    let mut max_wage_dev = 0.0_f64;
    let mut rows = 0usize;
    let mut violations = 0usize;

    println!(
        "{:>10}{:>10}{:>14}{:>16}{:>16}{:>10}",
        "k", "scale", "lambda*", "lambda dev", "w* rel dev", "status"
    );
    for &k in &args.k_grid {
        let base = solve_lambda_star(k, &family, DEFAULT_FOC_TOLERANCE)?;
        // Uniqueness: an interior optimum passing the second-order check
        // must be the only sign change of the first-order condition.
        if base.is_interior && base.soc_satisfied && foc_sign_changes(k, &family) != 1 {
            eprintln!("uniqueness violated at k = {k}");
            violations += 1;
        }
        for &scale in &args.scales {
            // A fresh (K, L) pair at the same ratio: L scaled, K rebuilt
            // from it. The division does not cancel bitwise, so the check
            // sees genuinely different floating-point inputs.
            let scaled_labor = labor * scale;
            let scaled_capital = k * scaled_labor;
            let scaled_ratio = scaled_capital / scaled_labor;
            let scaled = solve_lambda_star(scaled_ratio, &family, DEFAULT_FOC_TOLERANCE)?;
            let lambda_dev = (scaled.lambda_star - base.lambda_star).abs();
            let wage_dev = ((scaled.wage_star - base.wage_star) / base.wage_star).abs();
            max_lambda_dev = max_lambda_dev.max(lambda_dev);
            max_wage_dev = max_wage_dev.max(wage_dev);
            let ok = lambda_dev <= args.tolerance && wage_dev <= args.tolerance;
            if !ok {
                violations += 1;
            }
            rows += 1;
            println!(
                "{:>10}{:>10}{:>14.8}{:>16.3e}{:>16.3e}{:>10}",
                k,
                scale,
                scaled.lambda_star,
                lambda_dev,
                wage_dev,
                if ok { "ok" } else { "VIOLATED" }
            );
        }
    }
    println!(
        "{rows} checks; max lambda* deviation {max_lambda_dev:.3e}; \
         max w* relative deviation {max_wage_dev:.3e}; tolerance {:.3e}",
        args.tolerance
    );
    if violations > 0 {
        eprintln!("{violations} violation(s): the solved optimum is not scale invariant");
        return Ok(ExitCode::from(5));
    }
    Ok(ExitCode::SUCCESS)
}
