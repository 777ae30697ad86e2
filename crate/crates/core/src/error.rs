use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("{quantity} = {value:e} is out of domain: {reason}")]
    Domain {
        quantity: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Malformed optical data; `line` is 1-based in the source stream.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A sum or integral did not reach its tolerance.
    #[error("{what} did not converge{}: {diagnostics}", fmt_separation(*.separation))]
    Convergence {
        what: &'static str,
        separation: Option<f64>,
        diagnostics: String,
    },

    #[error("search failed: {0}")]
    Search(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_separation(z: Option<f64>) -> String {
    match z {
        Some(z) => format!(" at z = {:.4} nm", z * 1e9),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            quantity,
            value,
            reason,
        }
    }

    /// Attach the separation at which a convergence failure happened.
    pub fn at_separation(self, z: f64) -> Self {
        match self {
            Error::Convergence {
                what,
                separation: None,
                diagnostics,
            } => Error::Convergence {
                what,
                separation: Some(z),
                diagnostics,
            },
            other => other,
        }
    }

    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::Search(_))
    }
}
