use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),

    #[error("symmetric transition matrix required (max asymmetry {asymmetry:.3e})")]
    SymmetryRequired { asymmetry: f64 },

    #[error("invalid transition matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid evolution parameters: {0}")]
    InvalidParams(String),

    #[error("|u|·ρ = {product:.6} ≥ 1 (ρ = {rho:.6}); u lies outside the convergence disk")]
    Radius { rho: f64, product: f64 },

    #[error("argument outside the accuracy envelope: {0}")]
    Envelope(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("kernel truncation: residual {residual:.3e} still above {target:.0e} at radius cap {cap}")]
    Truncation { residual: f64, target: f64, cap: usize },

    #[error("grid {grid} too coarse for moment r = {r}; need grid > r")]
    GridTooCoarse { grid: usize, r: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
