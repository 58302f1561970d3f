use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix is not an isometry (deviation {deviation:.3e})")]
    NotIsometry { deviation: f64 },
    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace is {trace:.12} instead of 1")]
    TraceNotOne { trace: f64 },
    #[error("vector is not normalized (norm² deviates by {deviation:.3e})")]
    NotNormalized { deviation: f64 },
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("subsystem `{label}` must have dimension >= 1")]
    InvalidDimension { label: String },
    #[error("label sets must be disjoint (shared label `{0}`)")]
    OverlappingLabels(String),
    #[error("need at least one label to keep")]
    EmptyKeep,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("layouts do not match: {0}")]
    LayoutMismatch(String),
    #[error("basis is not orthonormal (deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },
    #[error("projectors do not form an orthogonal resolution of identity ({0})")]
    BadProjectors(String),
    #[error(
        "generator has a near-degenerate spectrum (min gap {min_gap:.3e}); \
         supply an explicit pinching basis"
    )]
    DegenerateGenerator { min_gap: f64 },
    #[error("pinching is not rank-1; a Stinespring dilation needs a full basis")]
    NonRank1Pinching,
    #[error("invalid probability distribution: {0}")]
    InvalidProbabilities(String),
    #[error("rotation angles must be pairwise distinct")]
    DuplicateAngles,
    #[error("relative entropy is infinite (support violation), cannot use as a finite term")]
    InfiniteRelativeEntropy,
    #[error("cross-check failed: {context} disagree by {deviation:.3e} (tolerance {tolerance:.1e})")]
    CrossCheckFailed {
        context: &'static str,
        deviation: f64,
        tolerance: f64,
    },
    #[error("bound violated: {context} gap {gap:.3e} below -{tolerance:.1e}")]
    BoundViolated {
        context: String,
        gap: f64,
        tolerance: f64,
    },
    #[error("conditional expectations do not commute (deviation {deviation:.3e})")]
    NotCommuting { deviation: f64 },
    #[error("recovery candidate is not CPTP: {0}")]
    NotCptp(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed JSON input: {0}")]
    Json(#[from] serde_json::Error),
}
