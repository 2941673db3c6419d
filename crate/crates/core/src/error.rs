use thiserror::Error;

/// Errors raised by pricing, sensitivity and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AmpoError {
    #[error("{field} must be {requirement} (got {value})")]
    InvalidParameter {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("spot {spot} lies outside the continuation region (exercise boundary {boundary})")]
    OutsideContinuation { spot: f64, boundary: f64 },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error(
        "lattice not converged: {steps} vs {coarse_steps} steps moved the price by {change:.3e} (tolerance {tolerance:.1e})"
    )]
    Convergence {
        steps: usize,
        coarse_steps: usize,
        change: f64,
        tolerance: f64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, AmpoError>;

pub(crate) fn require(
    ok: bool,
    field: &'static str,
    requirement: &'static str,
    value: f64,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(AmpoError::InvalidParameter {
            field,
            requirement,
            value,
        })
    }
}
