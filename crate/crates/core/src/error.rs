use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} is singular at x = {x}")]
    Singular { what: &'static str, x: Complex64 },

    #[error("shift {shift} leaves the analyticity strip of half-width {strip}")]
    StripViolation { shift: f64, strip: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by evaluating outside the numerical domain
    /// (singular denominators, strip violations, empty flow domains).
    pub fn is_numerical_domain(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::StripViolation { .. } | Error::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
