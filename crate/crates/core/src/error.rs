use thiserror::Error;

/// Errors raised while validating instances or running the engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("field `{field}`: expected an integer, found {value}")]
    Integrality { field: String, value: String },

    #[error("field `{field}`: expected length {expected}, found {found}")]
    Dimension {
        field: String,
        expected: usize,
        found: usize,
    },

    #[error("field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    #[error("cone block {block}: polyhedral cone is not pointed (rank {rank} < dim {dim})")]
    NonPointedCone { block: usize, rank: usize, dim: usize },

    #[error("cone block {block}: {operation} is not supported for {kind} blocks")]
    UnsupportedCone {
        block: usize,
        kind: &'static str,
        operation: &'static str,
    },

    #[error("right-hand-side set has {count} points, above the cap of {cap}")]
    RhsCapExceeded { count: u128, cap: u64 },

    #[error("brute-force enumeration needs {needed} points, above the budget of {budget}")]
    EnumerationBudget { needed: u128, budget: u64 },

    #[error("doubling memo grew past {budget} entries")]
    RecursionBudgetExceeded { budget: u64 },

    #[error("integer overflow while {context}")]
    Overflow { context: &'static str },

    #[error("instance has free variables; split them before {operation}")]
    FreeVariables { operation: &'static str },

    #[error("no certified iteration bound is available and no kbar override was given")]
    NoCertifiedBound,

    #[error("inconsistent state at beta {beta:?}: {detail}")]
    InconsistentState { beta: Vec<i64>, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dimension(field: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::Dimension {
            field: field.into(),
            expected,
            found,
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidField {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
