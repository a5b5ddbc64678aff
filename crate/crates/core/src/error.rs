use alloc::string::String;

use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants split into validation failures (bad input, violated
/// preconditions) and numerical failures; see [`Error::is_numerical`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: expected {expected:?}, got {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("weights must be nonnegative and sum to 1 (sum = {sum})")]
    WeightSum { sum: f64 },
    #[error("hermitian pairing violated at kraus index {index}: {reason}")]
    Pairing { index: usize, reason: String },
    #[error("letter {letter} out of range 1..={alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("empty trace at byte {pos}")]
    EmptyTrace { pos: usize },
    #[error("empty input")]
    EmptyInput,
    #[error(
        "series convergence needs m_total <= N (m_total = {m_total}, N = {n}); pass the override to force"
    )]
    ConvergenceNotGuaranteed { m_total: usize, n: usize },
    #[error("term budget of {budget} live terms exceeded at level {level}; use evaluate_exact")]
    BudgetExceeded { budget: usize, level: usize },
    #[error("query has {letters} letters, above the symbolic budget of {budget}")]
    SymbolicBudget { letters: usize, budget: usize },
    #[error("singular Schwinger-Dyson system at query {key}")]
    SingularSystem { key: String },
    #[error("eigensolver failed to converge (seed {seed:?})")]
    Eigensolver { seed: Option<u64> },
    #[error("moment estimate undefined: trace moment {moment} <= 1")]
    UndefinedEstimate { moment: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    /// True for failures of numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem { .. }
                | Error::Eigensolver { .. }
                | Error::UndefinedEstimate { .. }
                | Error::BudgetExceeded { .. }
        )
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
