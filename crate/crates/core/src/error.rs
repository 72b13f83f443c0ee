use alloc::string::String;

/// Errors raised by model construction and the analyses built on it.
///
/// Indices in messages are 1-based to match the external formats.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("coordinate {coordinate}: no generators")]
    EmptyCoordinate { coordinate: usize },
    #[error("coordinate {coordinate}, generator {generator}: expected {expected} entries, found {found}")]
    WrongLength {
        coordinate: usize,
        generator: usize,
        expected: usize,
        found: usize,
    },
    #[error("coordinate {coordinate}, generator {generator}: negative entry {entry}")]
    NegativeEntry {
        coordinate: usize,
        generator: usize,
        entry: usize,
    },
    #[error("coordinate {coordinate}, generator {generator}: row sum {sum} exceeds 1")]
    RowSum {
        coordinate: usize,
        generator: usize,
        sum: String,
    },
    #[error("coordinate {coordinate}: non-finite value")]
    NonFinite { coordinate: usize },
    #[error("coordinate {coordinate}: log_sum_exp weights have empty support")]
    EmptySupport { coordinate: usize },
    #[error("coordinate {coordinate}: log_sum_exp is only available in float mode")]
    LogSumExpInExactMode { coordinate: usize },
    #[error("operation requires pure max_affine coordinates (coordinate {coordinate} is log_sum_exp)")]
    LogSumExpUnsupported { coordinate: usize },
    #[error("mode mixing: {0}")]
    ModeMixing(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate {coordinate}: empty active set (float cancellation?)")]
    EmptyActiveSet { coordinate: usize },
    #[error("combinatorial cap exceeded: {needed} > {cap}")]
    CapExceeded { cap: usize, needed: usize },
    #[error("invalid node set: {0}")]
    InvalidNodeSet(String),
    #[error("coordinate {coordinate}: log_sum_exp support disjoint from the restriction set")]
    DisjointSupport { coordinate: usize },
    #[error("graph component {node} is trivial: cyclicity undefined")]
    TrivialComponent { node: usize },
    #[error("not a (sub)stochastic matrix: {0}")]
    NotStochastic(String),
    #[error("not a final class of the matrix")]
    NotFinalClass,
    #[error("singular linear system")]
    Singular,
    #[error("invalid eigenpair: residual {residual:e} exceeds tolerance {tol:e}")]
    InvalidEigenpair { residual: f64, tol: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("iteration budget of {max_iter} exhausted (residual {residual:e})")]
    MaxIterations { max_iter: usize, residual: f64 },
    #[error("invalid section: {0}")]
    InvalidSection(String),
    #[error("exact mode required")]
    ExactModeRequired,
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("invalid MDP: {0}")]
    InvalidMdp(String),
    #[error("invalid max-plus matrix: {0}")]
    InvalidMaxPlus(String),
    #[error("max-plus matrix is reducible")]
    Reducible,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
