use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two value sets (or a value set and a scalar) of different variable kinds met.
    #[error("kind mismatch: {0}")]
    KindMismatch(String),

    /// Structural problem in a knowledge base, table or input file.
    #[error("invalid data: {0}")]
    Invalid(String),

    #[error("nothing to discriminate: at least two assertions are required")]
    NothingToDiscriminate,

    #[error("variable `{0}` is already selected")]
    AlreadySelected(String),

    #[error("missing value for variable `{variable}`: impute before evaluation")]
    MissingValue { variable: String },

    #[error("variable `{0}` has no observed value to impute from")]
    AllMissing(String),

    #[error("gamma must lie in [0, 0.5], got {0}")]
    GammaOutOfRange(f64),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
