use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input outside the domain of the operation (negative photon
    /// number, transmissivity outside [0, 1], mismatched mode counts...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A covariance matrix that cannot be symplectically diagonalised.
    #[error("decomposition error: {0}")]
    Decomposition(String),

    /// The Gibbs matrix diverges for a pure mode.
    #[error("pure-state divergence in mode {mode} (symplectic eigenvalue {nu})")]
    PureState { mode: usize, nu: f64 },

    /// Loss of positive definiteness, non-convergence and similar failures.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),
}

impl Error {
    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::UnknownFigure(_) | Error::Scenario(_)
        )
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
