use thiserror::Error;

/// Error type shared across the crate.
///
/// Variants are grouped by the process exit code the CLI maps them to:
/// invalid input (1), resource guards (2), internal failures (3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("generation failed after {tries} tries: best achievable slack eta was {best_eta} (requested {requested_eta})")]
    GenerationFailure {
        tries: u64,
        best_eta: String,
        requested_eta: String,
    },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("internal invariant breach: {0}")]
    InvariantBreach(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code for the CLI: 0 is success, 1 invalid input,
    /// 2 resource guard tripped, 3 internal invariant breach.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::ConstraintViolation(_)
            | Error::Unsupported(_)
            | Error::Parse(_)
            | Error::Infeasible(_) => 1,
            Error::TooLarge(_) | Error::GenerationFailure { .. } => 2,
            Error::SolverFailure(_) | Error::InvariantBreach(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_documented_grouping() {
        assert_eq!(Error::invalid("x").exit_code(), 1);
        assert_eq!(Error::Parse("x".into()).exit_code(), 1);
        assert_eq!(Error::TooLarge("x".into()).exit_code(), 2);
        assert_eq!(
            Error::GenerationFailure {
                tries: 3,
                best_eta: "1/2".into(),
                requested_eta: "1/5".into()
            }
            .exit_code(),
            2
        );
        assert_eq!(Error::SolverFailure("x".into()).exit_code(), 3);
        assert_eq!(Error::InvariantBreach("x".into()).exit_code(), 3);
    }
}
