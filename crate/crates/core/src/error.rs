use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("mesh dimension must be 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("number of subdivisions must be at least 1")]
    ZeroSubdivisions,
    #[error("face {face} references missing vertex {vertex}")]
    DanglingVertex { face: usize, vertex: usize },
    #[error("element {element} references missing face {face}")]
    DanglingFace { element: usize, face: usize },
    #[error("face {face} is incident to {count} elements (expected 1 or 2)")]
    Incidence { face: usize, count: usize },
    #[error("face {face} is not planar (deviation {deviation:e} exceeds {tolerance:e})")]
    NonPlanarFace {
        face: usize,
        deviation: f64,
        tolerance: f64,
    },
    #[error("face {face} is degenerate (fewer than {min} distinct vertices or zero measure)")]
    DegenerateFace { face: usize, min: usize },
    #[error("element {element} has non-positive volume {volume:e}")]
    NonPositiveVolume { element: usize, volume: f64 },
    #[error("interior face {face} has the same orientation in both incident elements")]
    InconsistentOrientation { face: usize },
    #[error("degenerate sub-simplex (measure {measure:e}) in {entity}")]
    DegenerateSubSimplex { entity: String, measure: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("singular Gram matrix on {entity}")]
    SingularGram { entity: String },
    #[error("element block A_TT of element {element} is singular (pivot column {column})")]
    SingularElementBlock { element: usize, column: usize },
    #[error("model is degenerate on element {element}: A_ref = 0 and r_flat = 0")]
    DegenerateModel { element: usize },
    #[error("linear solver did not converge: {iterations} iterations, relative residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("condensed matrix is singular ({detail})")]
    SingularSystem { detail: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
