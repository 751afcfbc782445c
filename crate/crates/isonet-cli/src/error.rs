//! CLI-level errors with process exit codes.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Error from the geometry library (carries vertex/quad locations).
    Core(isonet::Error),
    Io(std::io::Error),
    /// Malformed config or mesh input, with a 1-based line number.
    Parse {
        line: usize,
        message: String,
    },
    /// A vertex maps to the stereographic pole.
    PoleHit {
        m: usize,
        n: usize,
    },
    /// A net exported without projection has a non-vanishing real part.
    NonImaginaryVertex {
        m: usize,
        n: usize,
        w: f64,
    },
    /// The requested cmc transform has no admissible initial point.
    CmcWindow {
        nu: f64,
    },
    /// Config-level problem that is not tied to a line (missing keys etc.)
    Config(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            CliError::PoleHit { m, n } => {
                write!(f, "vertex ({m}, {n}) hits the stereographic pole -1")
            }
            CliError::NonImaginaryVertex { m, n, w } => write!(
                f,
                "vertex ({m}, {n}) has real part {w:.3e}; not a point of R^3"
            ),
            CliError::CmcWindow { nu } => write!(
                f,
                "cmc window violated: nu = {nu:.6e} must satisfy nu > 1/4 or nu < 0"
            ),
            CliError::Config(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<isonet::Error> for CliError {
    fn from(e: isonet::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    /// Exit code contract: 2 for unusable input, 1 for everything that means
    /// "the job ran and failed".
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
