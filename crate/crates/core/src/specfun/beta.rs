use rug::Float;

use crate::error::{domain, Error, Result};
use crate::precision::{PrecisionCtx, ToReal};

use super::gamma::log_gamma_mp;

/// `log B(p, q)`.
pub(crate) fn log_beta(p: &Float, q: &Float) -> Result<Float> {
    let prec = p.prec();
    Ok(log_gamma_mp(p)? + log_gamma_mp(q)? - log_gamma_mp(&Float::with_val(prec, p + q))?)
}

/// Continued fraction for the lower incomplete beta integral
/// `int_0^x u^(p-1) (1-u)^(q-1) du`, returned as its logarithm.
/// Converges quickly for `x < (p + 1) / (p + q + 2)`.
pub(crate) fn log_lower_beta_cf(p: &Float, q: &Float, x: &Float) -> Result<Float> {
    let prec = p.prec();
    let one = Float::with_val(prec, 1);
    let tiny = Float::with_val(prec, 1) >> (2 * prec);
    let eps = Float::with_val(prec, 1) >> (prec - 4);
    let pq = Float::with_val(prec, p + q);
    let p1 = Float::with_val(prec, p + 1u32);
    let pm1 = Float::with_val(prec, p - 1u32);

    let guard = |v: Float| if Float::with_val(prec, v.abs_ref()) < tiny { tiny.clone() } else { v };
    let mut c = one.clone();
    let mut d = guard(Float::with_val(prec, &one - Float::with_val(prec, &pq * x) / &p1));
    d.recip_mut();
    let mut h = d.clone();
    let max_iter = 20 * prec as usize + 1000;
    let mut converged = false;
    for m in 1..=max_iter as u32 {
        let m2 = 2 * m;
        // even step
        let mut aa = Float::with_val(prec, q - m) * m;
        aa *= x;
        aa /= Float::with_val(prec, &pm1 + m2) * Float::with_val(prec, p + m2);
        d = guard(Float::with_val(prec, &aa * &d) + 1u32);
        c = guard(Float::with_val(prec, &aa / &c) + 1u32);
        d.recip_mut();
        h *= Float::with_val(prec, &d * &c);
        // odd step
        let mut aa = -(Float::with_val(prec, p + m) * Float::with_val(prec, &pq + m));
        aa *= x;
        aa /= Float::with_val(prec, p + m2) * Float::with_val(prec, &p1 + m2);
        d = guard(Float::with_val(prec, &aa * &d) + 1u32);
        c = guard(Float::with_val(prec, &aa / &c) + 1u32);
        d.recip_mut();
        let del = Float::with_val(prec, &d * &c);
        h *= &del;
        if Float::with_val(prec, del - 1u32).abs() < eps {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { what: "incomplete beta continued fraction", iterations: max_iter });
    }
    let ln_x = Float::with_val(prec, x.ln_ref());
    let ln_1mx = Float::with_val(prec, (-x.clone()).ln_1p());
    Ok(Float::with_val(prec, p * ln_x) + Float::with_val(prec, q * ln_1mx) + h.ln()
        - Float::with_val(prec, p.ln_ref()))
}

/// `log int_t^1 x^(p-1) (1-x)^(q-1) dx` for `p, q > 0`, `0 <= t < 1`.
pub(crate) fn log_upper_beta(p: &Float, q: &Float, t: &Float) -> Result<Float> {
    let prec = p.prec();
    let full = log_beta(p, q)?;
    if t.is_zero() {
        return Ok(full);
    }
    let split = Float::with_val(prec, p + 1u32) / (Float::with_val(prec, p + q) + 2u32);
    if *t < split {
        // B - lower; the lower part is at most about half of B here
        let lower = log_lower_beta_cf(p, q, t)?;
        let ratio = Float::with_val(prec, &lower - &full).exp();
        Ok(full + Float::with_val(prec, -ratio).ln_1p())
    } else {
        let s = Float::with_val(prec, 1u32 - t);
        log_lower_beta_cf(q, p, &s)
    }
}

/// `log int_t^1 x^(k + alpha) (1 - x)^beta dx`, the `k`-th moment of the
/// Jacobi weight restricted to `[t, 1]`.
pub fn log_inc_beta(k: u32, t: impl ToReal, alpha: f64, beta: f64, ctx: &PrecisionCtx) -> Result<Float> {
    let t = t.to_real(ctx.prec());
    log_moment_mp(k, &t, alpha, beta)
}

pub(crate) fn log_moment_mp(k: u32, t: &Float, alpha: f64, beta: f64) -> Result<Float> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(domain("log_inc_beta", format!("exponents alpha = {alpha}, beta = {beta} must exceed -1")));
    }
    if t.is_sign_negative() && !t.is_zero() || *t >= 1 {
        return Err(domain("log_inc_beta", format!("t = {} outside [0, 1)", t.to_f64())));
    }
    let prec = t.prec();
    let p = Float::with_val(prec, alpha) + (k + 1);
    let q = Float::with_val(prec, beta) + 1u32;
    log_upper_beta(&p, &q, t)
}

/// `log int_0^t x^(k + alpha) (1 - x)^beta dx` for small `t`.
pub(crate) fn log_lower_moment_mp(k: u32, t: &Float, alpha: f64, beta: f64) -> Result<Float> {
    let prec = t.prec();
    let p = Float::with_val(prec, alpha) + (k + 1);
    let q = Float::with_val(prec, beta) + 1u32;
    let split = Float::with_val(prec, &p + 1u32) / (Float::with_val(prec, &p + &q) + 2u32);
    if *t < split {
        log_lower_beta_cf(&p, &q, t)
    } else {
        let full = log_beta(&p, &q)?;
        let upper = log_lower_beta_cf(&q, &p, &Float::with_val(prec, 1u32 - t))?;
        let ratio = Float::with_val(prec, &upper - &full).exp();
        Ok(full + Float::with_val(prec, -ratio).ln_1p())
    }
}
