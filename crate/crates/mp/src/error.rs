use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid program: {0}")]
    InvalidProgram(String),

    #[error("solve_lp requires a continuous program, but `{0}` has integer variables")]
    IntegerVariablesInLp(String),

    #[error("numerical breakdown in {context}: {detail}")]
    Numerical { context: String, detail: String },

    #[error("unknown solver backend `{0}`")]
    UnknownBackend(String),
}
