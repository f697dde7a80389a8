use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("mesh needs at least one cell per direction, got nx = {nx}, nt = {nt}")]
    EmptyMesh { nx: usize, nt: usize },
    #[error("element {id} does not exist (mesh has {count} elements)")]
    InvalidElement { id: usize, count: usize },
    #[error("slab {slab} does not exist (mesh has {count} slabs)")]
    InvalidSlab { slab: usize, count: usize },
    #[error("slab {slab} cannot be assembled on top of {below}")]
    WrongPreviousSlab { slab: usize, below: String },
    #[error("quadrature rule with {requested} nodes requested, supported range is 1..={max}")]
    QuadratureSize { requested: usize, max: usize },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("global system has {dofs} dofs, dense oracle is capped at {cap}")]
    SystemTooLarge { dofs: usize, cap: usize },
    #[error("solver failed on slab {slab} (pivot-ratio condition estimate {condition_estimate:.3e}): {source}")]
    SlabSolve {
        slab: usize,
        condition_estimate: f64,
        #[source]
        source: LinalgError,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the linear solve, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::SlabSolve { .. } | Error::Linalg(_) => true,
            Error::AtLevel { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
