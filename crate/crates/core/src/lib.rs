//! Gap probabilities for the Jacobi unitary ensemble near the hard edge.
//!
//! The probability that the interval `(0, t)` holds no eigenvalue is
//! computed by several independent routes: finite-`n` Hankel determinants,
//! the sigma form of a Painleve VI equation, the Bessel-kernel Fredholm
//! determinant in the hard-edge limit, closed-form asymptotic expansions and
//! a Monte-Carlo sampler.

pub mod asymptotics;
pub mod error;
pub mod finite_n;
pub mod fredholm;
pub mod linalg;
pub mod mc;
pub mod ode;
pub mod painleve;
pub mod precision;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use precision::{PrecisionCtx, ToReal};
