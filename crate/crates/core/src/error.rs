use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("bodies {body_a} and {body_b} overlap: centroid distance {distance:e} nm")]
    GeometryOverlap {
        body_a: usize,
        body_b: usize,
        distance: f64,
    },

    #[error("invalid rigid motion: {0}")]
    InvalidMotion(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular material: {0}")]
    SingularMaterial(String),

    #[error("singular determinant at lambda = {lambda}: {detail}")]
    SingularDeterminant { lambda: f64, detail: String },

    #[error("eigen-solver failed for N = {n}: {detail}")]
    NumericalFailure { n: usize, detail: String },

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("mesh too coarse: {0}")]
    CoarseMesh(String),

    #[error("voxel resolution too coarse: {0}")]
    RefineResolution(String),

    #[error("mesh file line {line}: {msg}")]
    MeshParse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
