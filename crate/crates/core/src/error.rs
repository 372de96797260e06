use crate::grid::{Grid, Space};
use crate::solver::SolitonResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("expected a field in {expected} space, got {found}")]
    WrongSpace { expected: Space, found: Space },

    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(Grid, Grid),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate iterate: {0}")]
    Degenerate(String),

    #[error("monotone ascent violated at iteration {iteration}: Q dropped from {previous} to {current}")]
    AscentViolation {
        iteration: usize,
        previous: f64,
        current: f64,
    },

    #[error("solver did not converge after {} iterations (residual {:e})", .0.iterations, .0.residual)]
    NotConverged(Box<SolitonResult>),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
