use thiserror::Error;

pub type Result<T, E = GreenError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GreenError {
    /// The requested walk is recurrent, so its Green's function is infinite.
    #[error("the walk is recurrent for d = {d}; this domain needs d >= {required}")]
    Transience { d: usize, required: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Bessel order {order} exceeds the configured cap {cap}")]
    OrderCap { order: u64, cap: u32 },

    /// Carries the best estimate obtained before giving up.
    #[error(
        "tolerance {tol:e} not reached: best estimate {estimate} with error bound {error_bound:e}"
    )]
    Convergence {
        estimate: f64,
        error_bound: f64,
        tol: f64,
    },

    #[error("evaluation paths disagree: {0}")]
    Consistency(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("graph format error on line {line}: {message}")]
    Format { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GreenError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        GreenError::Domain(msg.into())
    }
}
