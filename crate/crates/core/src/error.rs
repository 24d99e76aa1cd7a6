use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    /// Every site already coincides with a center, so D² weights are all zero.
    #[error("total potential is zero; D² distribution is undefined")]
    DegeneratePotential,

    #[error("enumeration budget exceeded: needs more than {budget} outcomes ({what})")]
    BudgetExceeded { budget: u64, what: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
