use thiserror::Error;

pub type Result<T> = std::result::Result<T, NsfError>;

#[derive(Debug, Error)]
pub enum NsfError {
    /// An argument left the physical domain (nonpositive volume, temperature, ...).
    #[error("domain error: {what} = {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no admissible 3-shock: {0}")]
    NoAdmissibleShock(String),

    #[error("monotonicity violated: {0}")]
    Monotonicity(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    /// Volume or temperature became nonpositive during time stepping.
    #[error("positivity lost at t = {t}, grid index {index} ({what} = {value})")]
    Positivity {
        t: f64,
        index: usize,
        what: &'static str,
        value: f64,
    },

    #[error("boundary contamination: {0}")]
    BoundaryContamination(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn require_positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(NsfError::Domain { what, value })
    }
}
