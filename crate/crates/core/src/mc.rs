//! Monte Carlo sampling of Jacobi unitary ensemble spectra for integer
//! exponents, via the complex Wishart quotient `W1 (W1 + W2)^-1`.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Attempts per sample before giving up on a degenerate draw.
const MAX_REDRAWS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    /// Strictly increasing, inside `[0, 1]`.
    pub eigenvalues: Vec<f64>,
    /// Draws discarded (failed factorisation or tied eigenvalues) before
    /// this one was accepted.
    pub redraws: usize,
}

fn gaussian_block(rng: &mut ChaCha20Rng, rows: usize, cols: usize) -> DMatrix<Complex<f64>> {
    // real and imaginary parts with variance 1/2
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(re * s, im * s)
    })
}

fn draw(rng: &mut ChaCha20Rng, n: usize, a: usize, b: usize) -> Option<Vec<f64>> {
    let x1 = gaussian_block(rng, n, n + a);
    let x2 = gaussian_block(rng, n, n + b);
    let w1 = &x1 * x1.adjoint();
    let w2 = &x2 * x2.adjoint();
    let l = (&w1 + &w2).cholesky()?.unpack();
    // C = L^-1 W1 L^-H is Hermitian with the eigenvalues of W1 (W1 + W2)^-1
    let y = l.solve_lower_triangular(&w1)?;
    let c = l.solve_lower_triangular(&y.adjoint())?;
    let c = (&c + c.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = c.symmetric_eigenvalues().iter().map(|v| v.clamp(0.0, 1.0)).collect();
    ev.sort_by(f64::total_cmp);
    if ev.windows(2).any(|w| w[0] >= w[1]) {
        return None;
    }
    Some(ev)
}

/// One spectrum with density proportional to
/// `prod x_i^alpha (1 - x_i)^beta prod_{i<j} (x_i - x_j)^2` on `[0, 1]^n`.
pub fn sample_spectrum(n: usize, alpha: u32, beta: u32, spec: RngSpec) -> Result<SpectrumSample> {
    if n == 0 {
        return Err(domain("sample_spectrum", "n must be at least 1"));
    }
    let mut rng = spec.rng();
    for redraws in 0..MAX_REDRAWS {
        // a failed draw continues on the same substream
        if let Some(eigenvalues) = draw(&mut rng, n, alpha as usize, beta as usize) {
            return Ok(SpectrumSample { eigenvalues, redraws });
        }
    }
    Err(Error::NoConvergence { what: "spectrum sampler", iterations: MAX_REDRAWS })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalEstimate {
    /// Fraction of spectra with every eigenvalue in `[t, 1]`.
    pub p_hat: f64,
    /// Binomial standard error `sqrt(p (1 - p) / samples)`.
    pub se: f64,
    pub samples: usize,
    pub redraws: usize,
}

/// Estimates `P(lambda_min >= t)`. Sample `i` uses substream `i` of `seed`,
/// so the result does not depend on the thread count.
pub fn survival_estimate(samples: usize, t: f64, n: usize, alpha: u32, beta: u32, seed: u64) -> Result<SurvivalEstimate> {
    if samples < 100 {
        return Err(domain("survival_estimate", format!("{samples} samples; at least 100 required")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(domain("survival_estimate", format!("t = {t} outside (0, 1)")));
    }
    let (hits, redraws) = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = sample_spectrum(n, alpha, beta, RngSpec { seed, stream: i })?;
            Ok(((s.eigenvalues[0] >= t) as usize, s.redraws))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    let p_hat = hits as f64 / samples as f64;
    let se = (p_hat * (1.0 - p_hat) / samples as f64).sqrt();
    Ok(SurvivalEstimate { p_hat, se, samples, redraws })
}
