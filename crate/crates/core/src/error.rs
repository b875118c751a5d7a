use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A gamma or zeta evaluation hit a pole.
    #[error("{function} has a pole at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("incompatible scheme/problem: {0}")]
    Incompatible(String),

    #[error("singular step equation at n = {step}")]
    SingularStep { step: usize },

    #[error("degenerate order estimate: errors {coarse} and {fine}")]
    DegenerateOrder { coarse: f64, fine: f64 },

    #[error("invalid input: {0}")]
    Validation(String),
}

impl Error {
    /// True for failures rooted in the mathematics (poles, kernel domains,
    /// scheme/problem mismatches) rather than in malformed input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. }
                | Error::Domain(_)
                | Error::NonConvergence { .. }
                | Error::Incompatible(_)
                | Error::SingularStep { .. }
                | Error::DegenerateOrder { .. }
        )
    }
}
