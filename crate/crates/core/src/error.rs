use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A problem or parameter record violates one of its invariants.
    #[error("invalid {field}: {reason} (got {value})")]
    Invalid {
        field: &'static str,
        reason: &'static str,
        value: String,
    },

    #[error("layered schemes require exactly two receivers, got {0}")]
    ReceiverCount(usize),

    #[error("{0} requires bandwidth match (kappa = 1)")]
    KappaNotOne(&'static str),

    #[error("{what} = {value} outside [{lower}, {upper}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("role assignment c={c}, r={r} violates the refinement-receiver rule")]
    RoleRule { c: usize, r: usize },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` appears in more than one group")]
    OverlappingGroups(String),

    #[error("Markov condition {chain} violated: conditional mutual information {value:e}")]
    Markov { chain: &'static str, value: f64 },

    #[error("grid has {cells} cells, cap is {cap}")]
    GridTooLarge { cells: u128, cap: u128 },

    #[error("grid too coarse: {0} points per axis, need at least 3")]
    GridTooCoarse(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("problem file: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: &'static str, value: impl ToString) -> Self {
        Error::Invalid {
            field,
            reason,
            value: value.to_string(),
        }
    }
}
