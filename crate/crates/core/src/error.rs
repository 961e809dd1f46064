use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar or size argument is outside its admissible domain.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The error model does not apply to this kind of graph (e.g. M1 on a weighted graph).
    #[error("model domain error: {0}")]
    ModelDomain(String),

    #[error("invalid error partition: {0}")]
    Partition(String),

    #[error("kernel value {value} at ({x}, {y}) is outside [0, 1]")]
    KernelDomain { x: f64, y: f64, value: f64 },

    /// Input violates a structural requirement such as symmetry or nonnegativity.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("rank deficient input: {0}")]
    Rank(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("recursion diverged: {0}")]
    Instability(String),

    #[error("filter design failed: {message} (residual {residual:.3e})")]
    Design { message: String, residual: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_)
                | Error::Instability(_)
                | Error::Design { .. }
                | Error::Degenerate(_)
                | Error::Rank(_)
        )
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {p} is not a probability")))
    }
}
