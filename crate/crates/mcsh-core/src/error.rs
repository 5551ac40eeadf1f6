use crate::elliptic::EllipticSolveReport;
use thiserror::Error;

/// Errors surfaced by the core solver.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("negative Sobolev order s = {0}")]
    InvalidSobolevOrder(f64),
    #[error("unsupported Lp exponent p = {0} (supported: 2, 3, 4, 6, inf)")]
    UnsupportedLpExponent(f64),
    #[error(
        "elliptic solve for A0 did not converge: {} iterations, residual {:.3e}",
        report.iterations,
        report.final_residual
    )]
    EllipticNoConvergence { report: EllipticSolveReport },
    #[error("non-finite values in field `{field}` at t = {t}")]
    NonFinite { field: &'static str, t: f64 },
    #[error("state mismatch: {0}")]
    StateMismatch(String),
    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
