use thiserror::Error;

use crate::connection::ConnectionKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rank deficient: numerical rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("{what} is not symmetric (max asymmetry {residual:.3e})")]
    NonSymmetric { what: String, residual: f64 },

    #[error("{what} contains a non-finite entry")]
    NonFinite { what: String },

    #[error("vectors are not orthonormal (max Gram residual {residual:.3e})")]
    NotOrthonormal { residual: f64 },

    #[error("vector is not tangent to the submanifold (normal residual {residual:.3e})")]
    OutsideTangent { residual: f64 },

    #[error("expected a unit vector, found norm {norm}")]
    NotUnit { norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("theorem {theorem} requires a {expected:?} connection, instance has {found:?}")]
    WrongConnectionKind {
        theorem: String,
        expected: ConnectionKind,
        found: ConnectionKind,
    },

    #[error("theorem {theorem} requires argument `{argument}`")]
    MissingArgument { theorem: String, argument: String },

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
}

impl Error {
    pub(crate) fn dims(what: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            found,
        }
    }
}
