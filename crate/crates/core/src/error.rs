use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The config file could not be parsed. `key` names the offending entry
    /// when the parser can attribute the failure to one.
    #[error("configuration error at `{key}`: {message}")]
    Config { key: String, message: String },

    /// A parameter violates one of its documented bounds.
    #[error("invalid `{field}`: {value} violates {bound}")]
    Validation {
        field: &'static str,
        value: f64,
        bound: &'static str,
    },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("solver failed: {message} (i_ph = {i_ph} A, f(0) = {f_low}, f(i_ph) = {f_high})")]
    Solver {
        message: String,
        i_ph: f64,
        f_low: f64,
        f_high: f64,
    },

    /// A pipeline stage failed at a specific operating point.
    #[error("at L = {length_m} m, a = {radius_m} m, gamma = {gamma}: {source}")]
    AtPoint {
        length_m: f64,
        radius_m: f64,
        gamma: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed file: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Checks `value` against a bound, returning a [`Error::Validation`] on failure.
pub(crate) fn ensure(ok: bool, field: &'static str, value: f64, bound: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation {
            field,
            value,
            bound,
        })
    }
}
