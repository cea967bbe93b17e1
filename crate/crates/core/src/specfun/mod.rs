//! Special functions in extended precision.

mod bessel;
mod beta;
mod gamma;

pub use bessel::{bessel_pair, BesselSeries};
pub use beta::log_inc_beta;
pub use gamma::{bernoulli_even, log_barnes_g, log_barnes_g_spliced, log_gamma, zeta_prime_minus_one};

pub(crate) use beta::{log_lower_moment_mp, log_moment_mp};
pub(crate) use gamma::{log_barnes_g_mp, zeta_prime_minus_one_mp};
