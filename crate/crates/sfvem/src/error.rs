//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("polygon is not star-convex with respect to the fan apex: vertex {vertex} spans a non-positive triangle")]
    NotStarConvex { vertex: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh generation failed: {0}")]
    MeshGeneration(String),

    #[error("quadrature rule unavailable: {0}")]
    Quadrature(String),

    #[error("singular projector system: {0}")]
    SingularProjector(String),

    #[error("element rank deficit: expected {expected} zero modes, found {found} (element {element})")]
    RankDeficit {
        element: usize,
        expected: usize,
        found: usize,
    },

    #[error("boundary condition error: {0}")]
    BoundaryCondition(String),

    #[error("conflicting Dirichlet values at vertex {vertex} component {component}: {a} vs {b}")]
    ConflictingConstraint {
        vertex: usize,
        component: usize,
        a: f64,
        b: f64,
    },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
