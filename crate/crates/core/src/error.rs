use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid norm spec: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} did not converge (residual {residual:e})")]
    Convergence { what: &'static str, residual: f64 },

    #[error("non-monotone cumulative area at sample {index}: boundary is not convex or is misordered")]
    NonMonotoneArea { index: usize },

    #[error("correspondence routes disagree at phi={phi}: {primary} vs {fallback} (|diff| {diff:e})")]
    RouteDisagreement {
        phi: f64,
        primary: f64,
        fallback: f64,
        diff: f64,
    },

    #[error("quadrature tolerance not met: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("reduced Jacobian {value:e} below floor at phi={phi}, omega={omega}")]
    BelowFloor { phi: f64, omega: f64, value: f64 },

    #[error("rotation rate reaches the chart boundary |omega| = 2 pi_polar")]
    ChartBoundary,

    #[error("norm has affine correspondence map; no rigidity witness can exist")]
    AffineNorm,

    #[error("no rigidity witness found: {0}")]
    NoWitness(String),

    #[error("no bracket for the target exponent below t = {t_max}; sampled profile {profile:?}")]
    BracketNotFound { t_max: f64, profile: Vec<(f64, f64)> },
}
