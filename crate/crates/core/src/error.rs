use thiserror::Error;

use crate::scalar::Field;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mixed field modes: {left} vs {right}")]
    MixedField { left: Field, right: Field },

    #[error("modulus {modulus} divides a denominator")]
    DenominatorVanishes { modulus: u64 },

    #[error("invalid prime {0}: need a prime p with 2^30 < p < 2^63")]
    InvalidPrime(u64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("matrix is singular")]
    Singular,

    #[error("projector for factor {factor} is not idempotent")]
    NotIdempotent { factor: usize },

    #[error("invalid splitting: {0}")]
    Splitting(String),

    #[error("invalid curve: {0}")]
    Curve(String),

    #[error("curve degenerates to zero")]
    DegenerateCurve,

    #[error("generic rank not confirmed after {attempts} samples (ranks {ranks:?})")]
    Genericity { attempts: usize, ranks: Vec<usize> },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Parse failures as opposed to semantic ones.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
