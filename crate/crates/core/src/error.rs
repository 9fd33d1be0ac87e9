use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("non-degeneracy violated at t = {t:e}: max |kappa p_h| = {value:.6} >= 1")]
    NonDegeneracy { t: f64, value: f64 },

    #[error("fixed-point iteration did not converge at t = {t:e} after {iterations} iterations (last update {update:e})")]
    FixedPoint {
        t: f64,
        iterations: usize,
        update: f64,
    },

    #[error("linear solver failed: {message} (relative residual {residual:e})")]
    Solver { message: String, residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{experiment} failed at step {step} (t = {t:e}): {source}")]
    AtStep {
        experiment: String,
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
