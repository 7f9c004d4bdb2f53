use thiserror::Error;

/// Errors raised by graph construction, weight handling and the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quadrangulation: {0}")]
    InvalidGraph(String),
    #[error("unsupported surface for this operation: {0}")]
    Surface(String),
    #[error("non-standard weights at face {face}: C = {c}")]
    NonStandard { face: usize, c: f64 },
    #[error("weights are not free-fermion at face {face} (residual {residual:e})")]
    NotFreeFermion { face: usize, residual: f64 },
    #[error("weights outside the probability regime: {0}")]
    Regime(String),
    #[error("singular matrix")]
    Singular,
    #[error("enumeration too large: {0} dual edges exceed the cap of {1}")]
    TooLarge(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("pole of an elliptic function at {0}")]
    Pole(String),
    #[error("root finding failed: {0}")]
    Root(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
