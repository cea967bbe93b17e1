use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("matrix lost positive definiteness at pivot {pivot} with {bits} bits; increase precision")]
    Precision { bits: u32, pivot: usize },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("kernel eigenvalue {eigenvalue} is not below 1 at m = {m}; increase the quadrature size")]
    Contraction { eigenvalue: f64, m: usize },

    #[error("trajectory came within {distance:e} of the singular set {manifold} at t = {t}")]
    PoleProximity { t: f64, manifold: &'static str, distance: f64 },

    #[error("seed is unstable: halving the seed offset moved the trajectory by {discrepancy:e} (tolerance {tolerance:e})")]
    SeedInstability { discrepancy: f64, tolerance: f64 },

    #[error("step size underflow at t = {t} (step {step:e})")]
    StepUnderflow { t: f64, step: f64 },

    #[error("{quantity} is degenerate at t = {t}")]
    Degenerate { quantity: &'static str, t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain { op, msg: msg.into() }
}
