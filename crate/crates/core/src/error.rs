use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Residuals are carried as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric positive definite (pivot {pivot:e} at index {index})")]
    NotSpd { index: usize, pivot: f64 },
    #[error("operator is not selfadjoint for the supplied Gram matrix (residual {residual:e})")]
    NotSelfadjoint { residual: f64 },
    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("right-hand side is not orthogonal to the kernel (residual {residual:e})")]
    InconsistentRhs { residual: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("block is singular (smallest eigenvalue {min_eigenvalue:e})")]
    SingularBlock { min_eigenvalue: f64 },
    #[error("subspace is not the graph of an operator ({singular_dim} singular directions)")]
    NotAGraph { singular_dim: usize },
    #[error("common domain is not dense in the first space (rank {rank} of {dim})")]
    NotDense { rank: usize, dim: usize },
    #[error(
        "inclusion is not closable: a direction with zero first norm has nonzero second norm (residual {residual:e})"
    )]
    NotClosable { residual: f64 },
    #[error("operator is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("operator does not intertwine with the duality operator (residual {residual:e})")]
    NotIntertwining { residual: f64 },
    #[error("operator is not bounded below by the identity (smallest eigenvalue of A - I is {min_eigenvalue:e})")]
    NotSemibounded { min_eigenvalue: f64 },
    #[error("pair is not symmetric (residual {residual:e})")]
    PairIncompatible { residual: f64 },
    #[error("quadrature grid is too coarse (relative change {relative_change:e} under refinement)")]
    GridTooCoarse { relative_change: f64 },
    #[error("boundary operator Q is not norm preserving (residual {residual:e})")]
    QNotAdmissible { residual: f64 },
    #[error("defect components violate v = Qu (residual {residual:e})")]
    DecompositionMismatch { residual: f64 },
    #[error("block C12 is singular")]
    SingularC12,
    #[error("vertex coincides with the base vertex")]
    SameAsBase,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex `{vertex}` is missing from exhaustion level {level}")]
    VertexMissing { vertex: String, level: usize },
    #[error("network is not connected")]
    NotConnected,
    #[error("edge {u}-{v} has nonpositive conductance {value}")]
    NonpositiveConductance { u: String, v: String, value: f64 },
    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(String, String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable variant name, used for exit diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotSpd { .. } => "NotSPD",
            Error::NotSelfadjoint { .. } => "NotSelfadjoint",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::InconsistentRhs { .. } => "InconsistentRHS",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::SingularBlock { .. } => "SingularBlock",
            Error::NotAGraph { .. } => "NotAGraph",
            Error::NotDense { .. } => "NotDense",
            Error::NotClosable { .. } => "NotClosable",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::NotIntertwining { .. } => "NotIntertwining",
            Error::NotSemibounded { .. } => "NotSemibounded",
            Error::PairIncompatible { .. } => "PairIncompatible",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::QNotAdmissible { .. } => "QNotAdmissible",
            Error::DecompositionMismatch { .. } => "DecompositionMismatch",
            Error::SingularC12 => "SingularC12",
            Error::SameAsBase => "SameAsBase",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::VertexMissing { .. } => "VertexMissing",
            Error::NotConnected => "NotConnected",
            Error::NonpositiveConductance { .. } => "NonpositiveConductance",
            Error::SelfLoop(_) => "SelfLoop",
            Error::DuplicateEdge(..) => "DuplicateEdge",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
