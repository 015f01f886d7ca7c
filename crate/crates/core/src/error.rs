use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("steady state did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("M + i*omega*I is ill-conditioned at omega = {omega} (condition estimate {condition:.3e})")]
    IllConditioned { omega: f64, condition: f64 },

    #[error("effective coupling G vanishes; relative phase is undefined")]
    DegeneratePhase,

    #[error("no root of theta(phi) = {target_over_pi}*pi found on the phase scan")]
    NoRoot { target_over_pi: f64 },

    #[error("model is unstable (max Re(lambda) = {max_real:.6e})")]
    Unstable { max_real: f64 },

    #[error("tone response did not settle (period-to-period drift {drift:.3e})")]
    NotSettled { drift: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("missing required config keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
