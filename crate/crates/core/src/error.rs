use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameters (p = {p}, r = {r}) lie outside the set where 0 < r <= p")]
    OutsideSigma { p: f64, r: f64 },

    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    #[error("x = {x} lies outside the open support (0, {upper})")]
    Domain { x: f64, upper: f64 },

    #[error("x = {x} is within the edge region of the support upper bound {upper}")]
    EdgeRegion { x: f64, upper: f64 },

    #[error("hypergeometric series did not converge after {terms} terms (last |term| = {last_term:e})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("quadrature did not reach tolerance: estimate {value}, error estimate {error_estimate:e}")]
    Quadrature { value: f64, error_estimate: f64 },

    #[error("Mellin convolution mass drift {drift:e} exceeds tolerance")]
    MassDrift { drift: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
