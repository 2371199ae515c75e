use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("well-posedness violated: {0}")]
    IllPosed(String),
    #[error("frequency {omega} outside the admissible range |omega| {bound} {m}")]
    FrequencyOutOfRange {
        omega: f64,
        m: f64,
        bound: &'static str,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("numerical blow-up at t = {t}: max |psi| = {max_abs}")]
    BlowUp { t: f64, max_abs: f64 },
    #[error("state does not match grid: expected {expected} samples, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("spectral window: {0}")]
    Window(String),
    #[error("snapshot format: {0}")]
    Snapshot(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
