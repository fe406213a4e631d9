use thiserror::Error;

pub type Result<T> = std::result::Result<T, MillsError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MillsError {
    /// An argument lies outside the domain where the requested quantity is defined.
    #[error("{0}")]
    Domain(String),

    #[error("precision must be at least {min} bits, got {got}")]
    Precision { min: u32, got: u32 },

    #[error("|x| must not exceed {limit}, got {x}")]
    Envelope { x: String, limit: u32 },

    /// `A_n(x)` cannot be separated from zero at the working precision.
    #[error("A_{n}(x) vanishes within rounding error at x = {x}")]
    Singular { n: usize, x: String },

    #[error("identity {identity} violated at n = {n}")]
    IdentityViolation { identity: String, n: usize },

    #[error("coefficient of x^{power} in A_{n} is not an integer")]
    NonIntegral { n: usize, power: usize },

    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
}

impl MillsError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        MillsError::Domain(msg.into())
    }
}
