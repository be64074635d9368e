use thiserror::Error;

use crate::point::Point2;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("value out of representable range at degree {degree}: {what}")]
    Range { degree: usize, what: String },

    #[error("quadrature did not converge after {evals} evaluations (last estimates {last:?})")]
    NoConvergence { last: [f64; 2], evals: usize },

    #[error("empty curve: {0}")]
    EmptyCurve(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("use make_crossing for s = 0 (the curve xy = 0 is a normal crossing)")]
    UseCrossing,

    #[error("sampling resolution too coarse: {0}")]
    Resolution(String),

    #[error("graph recovery is multivalued at tangent coordinate {at}: sheets {first:.3e} and {second:.3e}")]
    Multivalued { at: f64, first: f64, second: f64 },

    #[error("Laurent reconstruction residual {residual:.3e} exceeds tolerance; increase N or the node count")]
    Bandwidth { residual: f64 },

    #[error("ill-posed constraint system (singular value {sigma:.3e}, residual {residual:.3e})")]
    IllPosed { sigma: f64, residual: f64 },

    #[error("inconsistent data at {at:?}: {detail}")]
    Consistency { at: Point2, detail: String },

    #[error("not divisible: value {value:.3e} at witness {witness:?}")]
    NotDivisible { witness: Point2, value: f64 },

    #[error("integrand not integrable near {at:?} (dyadic shell ratio {ratio:.3})")]
    Integrability { at: Point2, ratio: f64 },

    #[error("root finding budget exhausted: {0}")]
    RootBudget(String),
}
