//! Production-function mathematics: the CES family and its derived forms,
//! the wage identity, and the solver for the wage-maximizing labor share.

mod ces;
mod family;
mod solver;

pub use ces::{ces_intensive, ces_output, lambda_from_alpha, taylor_log_output, CesParams};
pub use family::{dlogw_dlambda, wage, ProductionFamily};
pub use solver::{foc_sign_changes, solve_lambda_star, LambdaStarResult};

/// Default tolerance on the first-order condition residual `|g(lambda)|`.
pub const DEFAULT_FOC_TOLERANCE: f64 = 1e-10;
