//! Finite-`n` Jacobi unitary ensemble quantities from Hankel moment matrices.
//!
//! `D_n(t) = det(mu_{i+j}(t))` with `mu_k(t) = int_t^1 x^(k+alpha) (1-x)^beta dx`,
//! and the gap probability `P(t) = D_n(t) / D_n(0)`.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{dot, Cholesky, FMatrix};
use crate::precision::{PrecisionCtx, ToReal};
use crate::specfun::{log_barnes_g_mp, log_moment_mp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
}

impl EnsembleParams {
    pub fn new(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        if !(alpha > -1.0 && alpha.is_finite()) {
            return Err(domain("ensemble", format!("alpha = {alpha} must exceed -1")));
        }
        if !(beta > -1.0 && beta.is_finite()) {
            return Err(domain("ensemble", format!("beta = {beta} must exceed -1")));
        }
        if n == 0 {
            return Err(domain("ensemble", "n must be at least 1"));
        }
        Ok(Self { alpha, beta, n })
    }

    /// `A_n = 2n + 1 + alpha + beta`.
    pub fn a_n(&self) -> f64 {
        2.0 * self.n as f64 + 1.0 + self.alpha + self.beta
    }

    pub fn a_n_mp(&self, prec: u32) -> Float {
        Float::with_val(prec, self.alpha) + self.beta + (2 * self.n as u32 + 1)
    }

    /// Parameters with `alpha` and `beta` exchanged, i.e. the ensemble seen
    /// through `x -> 1 - x`.
    pub fn reflected(&self) -> Self {
        Self { alpha: self.beta, beta: self.alpha, n: self.n }
    }
}

/// Hankel matrix of moments of `x^alpha (1-x)^(beta + beta_shift)` on `[t, 1]`.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    pub t: Float,
    pub beta_shift: i32,
    pub matrix: FMatrix,
}

impl MomentMatrix {
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }
}

pub(crate) fn hankel(t: &Float, alpha: f64, beta: f64, size: usize) -> Result<FMatrix> {
    let prec = t.prec();
    let moments: Vec<Float> = (0..(2 * size).saturating_sub(1))
        .map(|k| log_moment_mp(k as u32, t, alpha, beta).map(|l| l.exp()))
        .collect::<Result<_>>()?;
    Ok(FMatrix::from_fn(size, size, |i, j| Float::with_val(prec, &moments[i + j])))
}

fn check_t(op: &'static str, t: &Float) -> Result<()> {
    if t.is_nan() || (t.is_sign_negative() && !t.is_zero()) || *t >= 1 {
        return Err(domain(op, format!("t = {} outside [0, 1)", t.to_f64())));
    }
    Ok(())
}

/// The `n x n` moment matrix; `beta_shift` must be 0 or -1 (the latter needs `beta > 0`).
pub fn moment_matrix(t: impl ToReal, params: &EnsembleParams, beta_shift: i32, ctx: &PrecisionCtx) -> Result<MomentMatrix> {
    let t = t.to_real(ctx.prec());
    check_t("moment_matrix", &t)?;
    let beta = match beta_shift {
        0 => params.beta,
        -1 if params.beta > 0.0 => params.beta - 1.0,
        -1 => return Err(domain("moment_matrix", "shifted moments need beta > 0")),
        s => return Err(domain("moment_matrix", format!("beta_shift {s} not in {{0, -1}}"))),
    };
    let matrix = hankel(&t, params.alpha, beta, params.n)?;
    Ok(MomentMatrix { t, beta_shift, matrix })
}

/// `log D_n(t)` via Cholesky.
pub fn log_dn(t: impl ToReal, params: &EnsembleParams, ctx: &PrecisionCtx) -> Result<Float> {
    let t = t.to_real(ctx.prec());
    check_t("log_dn", &t)?;
    let m = hankel(&t, params.alpha, params.beta, params.n)?;
    Ok(Cholesky::new(&m).map_err(|e| with_bits(e, ctx))?.log_det())
}

fn with_bits(e: Error, ctx: &PrecisionCtx) -> Error {
    match e {
        Error::Precision { pivot, .. } => Error::Precision { bits: ctx.bits(), pivot },
        other => other,
    }
}

/// `log D_n(0)` from the Barnes-G closed form.
pub fn log_dn_at_zero_closed_form(params: &EnsembleParams, ctx: &PrecisionCtx) -> Result<Float> {
    let p = ctx.prec();
    let n = params.n as u32;
    let a = Float::with_val(p, params.alpha);
    let b = Float::with_val(p, params.beta);
    let ab = Float::with_val(p, &a + &b);
    let g = |z: Float| log_barnes_g_mp(&z);
    let mut acc = g(Float::with_val(p, n + 1))?;
    acc += g(Float::with_val(p, &a + (n + 1)))?;
    acc += g(Float::with_val(p, &b + (n + 1)))?;
    acc += g(Float::with_val(p, &ab + (n + 1)))?;
    acc -= g(Float::with_val(p, &a + 1u32))?;
    acc -= g(Float::with_val(p, &b + 1u32))?;
    acc -= g(Float::with_val(p, &ab + (2 * n + 1)))?;
    Ok(acc)
}

/// `log P(t)`: the probability that all eigenvalues exceed `t`.
pub fn log_prob_smallest(t: impl ToReal, params: &EnsembleParams, ctx: &PrecisionCtx) -> Result<Float> {
    let t = t.to_real(ctx.prec());
    let num = log_dn(&t, params, ctx)?;
    let den = log_dn(0.0, params, ctx)?;
    Ok(num - den)
}

/// `log` of the probability that all eigenvalues are below `t`, using
/// `P_L(t, alpha, beta) = P(1 - t, beta, alpha)`.
pub fn log_prob_largest(t: impl ToReal, params: &EnsembleParams, ctx: &PrecisionCtx) -> Result<Float> {
    let t = t.to_real(ctx.prec());
    if !(t > 0 && t <= 1) {
        return Err(domain("log_prob_largest", format!("t = {} outside (0, 1]", t.to_f64())));
    }
    let s = Float::with_val(ctx.prec(), 1u32 - &t);
    log_prob_smallest(s, &params.reflected(), ctx)
}

/// `H_n(t) = t (t - 1) d/dt log D_n(t)`, using `d M / dt = -w(t) v v^T` with
/// `v = (1, t, ..., t^(n-1))`.
pub fn hn_exact(t: impl ToReal, params: &EnsembleParams, ctx: &PrecisionCtx) -> Result<Float> {
    let t = t.to_real(ctx.prec());
    check_t("hn_exact", &t)?;
    let p = ctx.prec();
    if t.is_zero() {
        return Ok(Float::new(p));
    }
    let m = hankel(&t, params.alpha, params.beta, params.n)?;
    let ch = Cholesky::new(&m).map_err(|e| with_bits(e, ctx))?;
    let v = powers(&t, params.n);
    let y = ch.forward(&v);
    let quad = dot(&y, &y);
    Ok(quad * weight_power(&t, params.alpha + 1.0, params.beta + 1.0))
}

fn powers(t: &Float, count: usize) -> Vec<Float> {
    let mut v = Vec::with_capacity(count);
    let mut x = Float::with_val(t.prec(), 1);
    for _ in 0..count {
        v.push(x.clone());
        x *= t;
    }
    v
}

/// `t^a (1 - t)^b`.
fn weight_power(t: &Float, a: f64, b: f64) -> Float {
    let p = t.prec();
    let mut l = Float::with_val(p, t.ln_ref()) * a;
    l += Float::with_val(p, (-t.clone()).ln_1p()) * b;
    l.exp()
}

fn eval_poly(coeffs: &[Float], t: &Float) -> Float {
    let mut acc = Float::new(t.prec());
    for c in coeffs.iter().rev() {
        acc *= t;
        acc += c;
    }
    acc
}

/// Monic orthogonal polynomials `P_n`, `P_{n-1}` for the weight
/// `x^alpha (1-x)^beta` on `[t, 1]`, with coefficients in ascending powers.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    pub t: Float,
    pub p_n: Vec<Float>,
    pub p_nm1: Vec<Float>,
    pub h_n: Float,
    pub h_nm1: Float,
    pub p_n_at_t: Float,
    pub p_nm1_at_t: Float,
    /// Coefficient of `x^(n-1)` in `P_n`.
    pub p1: Float,
}

/// Monic coefficients of `P_k` and its squared norm from the Cholesky factor
/// of a moment matrix of size at least `k + 1`.
fn monic_from_cholesky(ch: &Cholesky, k: usize) -> (Vec<Float>, Float) {
    let l = ch.factor();
    let prec = l.prec();
    // row k of L^{-1}, via L^T r = e_k restricted to the leading block
    let lead = Cholesky::from_factor(l.leading(k + 1));
    let mut e = vec![Float::new(prec); k + 1];
    e[k] = Float::with_val(prec, 1);
    let r = lead.backward(&e);
    let lkk = l[(k, k)].clone();
    let mut coeffs: Vec<Float> = r.into_iter().map(|c| c * &lkk).collect();
    coeffs[k] = Float::with_val(prec, 1);
    (coeffs, Float::with_val(prec, lkk.square_ref()))
}

fn basis_from_cholesky(t: &Float, ch: &Cholesky, n: usize) -> OrthoBasis {
    let (p_n, h_n) = monic_from_cholesky(ch, n);
    let (p_nm1, h_nm1) = monic_from_cholesky(ch, n - 1);
    let p1 = p_n[n - 1].clone();
    OrthoBasis { t: t.clone(), p_n_at_t: eval_poly(&p_n, t), p_nm1_at_t: eval_poly(&p_nm1, t), p_n, p_nm1, h_n, h_nm1, p1 }
}

pub fn ortho_basis(t: impl ToReal, params: &EnsembleParams, ctx: &PrecisionCtx) -> Result<OrthoBasis> {
    let t = t.to_real(ctx.prec());
    check_t("ortho_basis", &t)?;
    let m = hankel(&t, params.alpha, params.beta, params.n + 1)?;
    let ch = Cholesky::new(&m).map_err(|e| with_bits(e, ctx))?;
    Ok(basis_from_cholesky(&t, &ch, params.n))
}

/// Auxiliary quantities of the ladder-operator approach.
#[derive(Debug, Clone)]
pub struct AuxQuantities {
    pub r_big: Float,
    pub r_small: Float,
    pub x: Float,
    pub y: Float,
}

/// `R_n, r_n, x_n, y_n` from their defining integrals, for `beta > 0`.
///
/// `x_n = beta <P_n, P_n>_{beta-1} / h_n`, `y_n = beta <P_n, P_{n-1}>_{beta-1} / h_{n-1}`,
/// `R_n = w(t) P_n(t)^2 / h_n`, `r_n = w(t) P_n(t) P_{n-1}(t) / h_{n-1}`,
/// where `<,>_{beta-1}` uses the weight with `beta` lowered by one.
pub fn aux_exact(t: impl ToReal, params: &EnsembleParams, ctx: &PrecisionCtx) -> Result<AuxQuantities> {
    let t = t.to_real(ctx.prec());
    check_t("aux_exact", &t)?;
    if !(params.beta > 0.0) {
        return Err(domain("aux_exact", "the auxiliary quantities need beta > 0"));
    }
    aux_for_degree(&t, params.alpha, params.beta, params.n, ctx)
}

fn aux_for_degree(t: &Float, alpha: f64, beta: f64, n: usize, ctx: &PrecisionCtx) -> Result<AuxQuantities> {
    let p = ctx.prec();
    if n == 0 {
        let m = hankel(t, alpha, beta, 1)?;
        let s = hankel(t, alpha, beta - 1.0, 1)?;
        let h0 = m[(0, 0)].clone();
        let w = if t.is_zero() { Float::new(p) } else { weight_power(t, alpha, beta) };
        return Ok(AuxQuantities {
            r_big: w / &h0,
            r_small: Float::new(p),
            x: Float::with_val(p, &s[(0, 0)] * beta) / &h0,
            y: Float::new(p),
        });
    }
    let m = hankel(t, alpha, beta, n + 1)?;
    let s = hankel(t, alpha, beta - 1.0, n + 1)?;
    let ch = Cholesky::new(&m).map_err(|e| with_bits(e, ctx))?;
    let basis = basis_from_cholesky(t, &ch, n);
    let mut q = basis.p_nm1.clone();
    q.push(Float::new(p));
    let sp = s.mul_vec(&basis.p_n);
    let x = Float::with_val(p, dot(&basis.p_n, &sp) * beta) / &basis.h_n;
    let y = Float::with_val(p, dot(&q, &sp) * beta) / &basis.h_nm1;
    let w = if t.is_zero() { Float::new(p) } else { weight_power(t, alpha, beta) };
    let r_big = Float::with_val(p, basis.p_n_at_t.square_ref()) * &w / &basis.h_n;
    let r_small = Float::with_val(p, &basis.p_n_at_t * &basis.p_nm1_at_t) * &w / &basis.h_nm1;
    Ok(AuxQuantities { r_big, r_small, x, y })
}

/// `x_n'(t)` by a central difference with step `h`, improved by one
/// Richardson stage (error `O(h^4)`).
pub fn x_derivative(t: impl ToReal, h: f64, params: &EnsembleParams, ctx: &PrecisionCtx) -> Result<Float> {
    let p = ctx.prec();
    let t = t.to_real(p);
    let x_at = |dt: f64| -> Result<Float> { Ok(aux_exact(Float::with_val(p, &t + dt), params, ctx)?.x) };
    let central = |h: f64| -> Result<Float> {
        let d = x_at(h)? - x_at(-h)?;
        Ok(d / Float::with_val(p, 2.0 * h))
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok((fine * 4u32 - coarse) / 3u32)
}

/// Linear response of `x_n` at `t = 0` to removing mass near the origin.
///
/// Holds the degree-`n` data of the full-interval weight so that, for a
/// perturbation `mu_k -> mu_k - dmu_k` (and likewise for the `beta - 1`
/// moments), the first-order change of `x_n` is a cheap bilinear form.
#[derive(Debug, Clone)]
pub(crate) struct ZeroResponse {
    pub beta: f64,
    pub n: usize,
    s: FMatrix,
    top: Cholesky,
    p: Vec<Float>,
    h: Float,
    psp: Float,
    pub x0: Float,
}

impl ZeroResponse {
    pub fn new(params: &EnsembleParams, prec: u32) -> Result<Self> {
        let n = params.n;
        let zero = Float::new(prec);
        let m = hankel(&zero, params.alpha, params.beta, n + 1)?;
        let s = hankel(&zero, params.alpha, params.beta - 1.0, n + 1)?;
        let ch = Cholesky::new(&m)?;
        let (p, h) = monic_from_cholesky(&ch, n);
        let psp = s.bilinear(&p, &p);
        let x0 = Float::with_val(prec, &psp * params.beta) / &h;
        let top = Cholesky::from_factor(ch.factor().leading(n));
        Ok(Self { beta: params.beta, n, s, top, p, h, psp, x0 })
    }

    /// First-order change of `x_n` when the moments move by `-dmu`, `-dnu`
    /// (`dmu_k`, `dnu_k` for `k = 0..=2n`).
    pub fn dx(&self, dmu: &[Float], dnu: &[Float]) -> Float {
        let n = self.n;
        let prec = self.h.prec();
        let dm = FMatrix::from_fn(n + 1, n + 1, |i, j| -Float::with_val(prec, &dmu[i + j]));
        let ds = FMatrix::from_fn(n + 1, n + 1, |i, j| -Float::with_val(prec, &dnu[i + j]));
        // M_top dp' = -(dM p)_top, dp_n = 0
        let dmp = dm.mul_vec(&self.p);
        let rhs: Vec<Float> = dmp[..n].iter().map(|v| -v.clone()).collect();
        let mut dp = self.top.solve(&rhs);
        dp.push(Float::new(prec));
        let dh = dot(&self.p, &dmp);
        let sp = self.s.mul_vec(&self.p);
        let dpsp = ds.bilinear(&self.p, &self.p) + dot(&dp, &sp) * 2u32;
        let term1 = Float::with_val(prec, &dpsp / &self.h);
        let term2 = Float::with_val(prec, &self.psp * &dh) / Float::with_val(prec, self.h.square_ref());
        (term1 - term2) * self.beta
    }
}
