use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("singular matrix (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    /// The mode determinant vanished at absolute optical frequency `omega`.
    #[error("optical singularity at omega = {omega:e} rad/s (|D| = {det:e})")]
    OpticalSingularity { omega: f64, det: f64 },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate frequency: quantity undefined at Omega = 0")]
    DegenerateFrequency,

    #[error("temperature must be positive, got {0} K")]
    NonpositiveTemperature(f64),

    /// Total damping `H + H_opt` is not positive.
    #[error("unstable mechanical dynamics: H + H_opt = {total_damping:e} kg/s")]
    UnstableSystem { total_damping: f64 },

    #[error("requested intracavity field is unreachable: {port} port has zero transmissivity")]
    UnreachableField { port: &'static str },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
