//! Error type shared by all series, field, and pipeline operations.
//!
//! Variants distinguish data-level precondition failures (which the CLI maps
//! to its own exit codes) from structural misuse, which panics instead.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("division by zero scalar")]
    DivisionByZero,

    #[error("constant term must be 1 for this operation, found {found}")]
    NotUnital { found: String },

    #[error("constant term must be 0 for this operation, found {found}")]
    NotConstantFree { found: String },

    #[error("entry for word of degree {degree} exceeds the declared max_degree {max_degree}")]
    EntryAbovePrecision { degree: usize, max_degree: usize },

    #[error("letter {letter} out of range for alphabet of size {alphabet}")]
    LetterOutOfRange { letter: u8, alphabet: u8 },

    #[error(
        "composition target component {component} has a nonzero constant term \
         and the outer series is not a detected polynomial"
    )]
    ConstantTermInComposition { component: u8 },

    #[error("series is not centered: degree-1 coefficient at letter {letter} is {found}")]
    NotCentered { letter: u8, found: String },

    #[error("linear coefficient matrix is singular")]
    SingularMatrix,

    #[error("covariance matrix is singular; the cumulant data is not regular")]
    SingularCovariance,

    #[error(
        "float linear solve is ill-conditioned: estimated condition {cond:.3e} exceeds {limit:.1e}"
    )]
    IllConditioned { cond: f64, limit: f64 },

    #[error("precision too low: need max_degree >= {needed}, have {have}")]
    PrecisionTooLow { needed: usize, have: usize },

    #[error("tree mark count must be at least 2, got {n}")]
    InvalidTreeMarks { n: usize },

    #[error("univariate check requires alphabet size 1, got {alphabet}")]
    NotUnivariate { alphabet: u8 },

    #[error("relation order must be in 2..=6, got {order}")]
    UnsupportedOrder { order: usize },

    #[error("sampler limit exceeded: {what} = {value} (maximum {max})")]
    SamplerLimit {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("sampler spec invalid: {what}")]
    SamplerSpec { what: String },

    #[error("unknown {registry} name {name:?}; known: {known}")]
    UnknownName {
        registry: &'static str,
        name: String,
        known: String,
    },
}
