use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("entry count {got} does not fill a {rows}x{cols} matrix")]
    BadShape { rows: usize, cols: usize, got: usize },

    #[error("state not normalized: squared norm is {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("vectors {i} and {j} are not orthonormal: |<i|j>| = {overlap:.3e}")]
    NotOrthonormal { i: usize, j: usize, overlap: f64 },

    #[error("vector {index} is linearly dependent on its predecessors")]
    LinearlyDependent { index: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("no eigenvalue within tolerance of {value}")]
    NoSuchEigenvalue { value: f64 },

    #[error("statements do not share a basis")]
    BasisMismatch,

    #[error("statements overlap at index {index}")]
    OverlappingStatements { index: usize },

    #[error("statement list is empty")]
    EmptyStatementList,

    #[error("measurement plan has no stages")]
    EmptyPlan,

    #[error("observables do not commute; the combination carries no truth value")]
    NoncommutingObservables,

    #[error("outcome {index} has probability {probability:.3e}, below the sampling floor")]
    ImpossibleOutcome { index: usize, probability: f64 },

    #[error("no stage labeled {label:?} in the trial records")]
    UnknownStage { label: String },

    #[error("internal consistency check failed in {context}: deviation {delta:.3e}")]
    ConsistencyCheck { context: &'static str, delta: f64 },
}
