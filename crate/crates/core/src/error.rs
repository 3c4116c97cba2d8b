use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("Hermitian eigensolver did not converge (residual {residual:.3e})")]
    EigenNonConvergence { residual: f64 },

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("dimension field n = {declared} does not match {actual} eigenvalues")]
    LengthMismatch { declared: usize, actual: usize },

    #[error("eigenvalue {value} at position {index} is negative")]
    NegativeEigenvalue { index: usize, value: f64 },

    #[error("eigenvalues sum to {sum}, expected 1")]
    TraceNotOne { sum: f64 },

    #[error("chart vector has {got} coordinate pairs, orbit needs {expected}")]
    ChartSizeMismatch { expected: usize, got: usize },

    #[error("vector is not tangent to the orbit (stabilizer component {residual:.3e})")]
    NotTangent { residual: f64 },

    #[error("point is not on the orbit (residual {residual:.3e})")]
    NotOnOrbit { residual: f64 },

    #[error("anticommutator equation undefined on root ({i},{j}): beta = {beta}")]
    UndefinedSld { i: usize, j: usize, beta: f64 },

    #[error("{what} is singular (smallest singular value {sigma_min:.3e})")]
    Singular { what: &'static str, sigma_min: f64 },

    #[error("metric is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("operation requires the pure state (1,0,...,0)")]
    NotPure,

    #[error("stabilizer inclusion fails: base partition {base:?} does not coarsen total partition {total:?}")]
    StabilizerInclusion {
        total: Vec<Vec<usize>>,
        base: Vec<Vec<usize>>,
    },

    #[error("not a Fisher structure: {0}")]
    NotFisherStructure(String),

    #[error("scaling factor q[{index}] = {value} is not strictly positive")]
    NonPositiveScale { index: usize, value: f64 },

    #[error("scaling factors do not respect the invariant planes of the structure")]
    ScalingBreaksStructure,

    #[error("malformed input: {0}")]
    Malformed(String),
}
