use crate::lie::GroupKind;

/// Errors produced by the library.
///
/// Variants are grouped so callers can map them onto coarse failure
/// categories: malformed input data vs. numerical breakdown.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("singular matrix: |det| = {abs_det:.3e} below tolerance")]
    Singular { abs_det: f64 },

    #[error("matrix is not in the Lie algebra of {kind}: {detail}")]
    NotInAlgebra { kind: GroupKind, detail: String },

    #[error("logarithm branch cut: {0}")]
    BranchCut(String),

    #[error("group kind mismatch: expected {expected}, got {actual}")]
    KindMismatch {
        expected: GroupKind,
        actual: GroupKind,
    },

    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("zero variance: pooled increments are all identical")]
    ZeroVariance,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("training diverged at epoch {epoch} (loss = {loss}); lower the learning rate")]
    TrainDiverged { epoch: usize, loss: f64 },

    #[error("{path}:{line}: {detail}")]
    DatasetFormat {
        path: String,
        line: usize,
        detail: String,
    },

    #[error("unsupported format version {found} (this build reads version {expected})")]
    FormatVersion { found: u32, expected: u32 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed or inconsistent input data,
    /// as opposed to numerical failures.
    pub fn is_data_error(&self) -> bool {
        !matches!(
            self,
            Error::Singular { .. }
                | Error::BranchCut(_)
                | Error::NonFinite(_)
                | Error::TrainDiverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
