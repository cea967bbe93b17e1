//! Truncated asymptotic expansions, each paired with an error budget equal
//! to the size of the first omitted order (constant taken as 1).

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::finite_n::EnsembleParams;
use crate::precision::PrecisionCtx;
use crate::specfun::{log_barnes_g_mp, zeta_prime_minus_one_mp};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub value: f64,
    pub budget: f64,
    pub order: String,
}

fn check_t(op: &'static str, t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain(op, format!("t = {t} outside (0, 1)")));
    }
    Ok(())
}

/// `log G(alpha + 1) - (alpha / 2) log(2 pi)`, the hard-edge constant.
pub fn hard_edge_constant(alpha: f64, ctx: &PrecisionCtx) -> Result<Float> {
    let p = ctx.prec();
    let two_pi = Float::with_val(p, rug::float::Constant::Pi) * 2u32;
    let g = log_barnes_g_mp(&(Float::with_val(p, alpha) + 1u32))?;
    Ok(g - Float::with_val(p, two_pi.ln() * alpha) / 2u32)
}

/// Large-gap expansion of `log det(I - K_Bessel)` on `(0, s)`, through `s^(-5/2)`.
pub fn logdet_series(s: f64, alpha: f64, ctx: &PrecisionCtx) -> Result<ExpansionResult> {
    if !(s > 0.0) {
        return Err(domain("logdet_series", format!("s = {s} must be positive")));
    }
    if !(alpha > -1.0) {
        return Err(domain("logdet_series", format!("alpha = {alpha} must exceed -1")));
    }
    let p = ctx.prec();
    let a = alpha;
    let sf = Float::with_val(p, s);
    let rs = Float::with_val(p, sf.sqrt_ref());
    let mut v = -Float::with_val(p, &sf / 4u32);
    v += Float::with_val(p, &rs * a);
    v -= Float::with_val(p, sf.ln_ref()) * (a * a / 4.0);
    v += hard_edge_constant(alpha, ctx)?;
    let tail = [
        a / 8.0,
        a * a / 16.0,
        a.powi(3) / 24.0 + 3.0 * a / 128.0,
        a.powi(4) / 32.0 + 9.0 * a * a / 128.0,
        a.powi(5) / 40.0 + 9.0 * a.powi(3) / 64.0 + 45.0 * a / 1024.0,
    ];
    let inv_rs = Float::with_val(p, rs.recip_ref());
    let mut pow = inv_rs.clone();
    for c in tail {
        v += Float::with_val(p, &pow * c);
        pow *= &inv_rs;
    }
    Ok(ExpansionResult { value: v.to_f64(), budget: s.powi(-3), order: "through s^(-5/2)".into() })
}

/// The six-term Barnes block shared by the near-one and large-`n` expansions:
/// `sum +- [z^2/2 - 1/12] log z` over `z in {n, n+b, 2n+a+b}` (plus) and
/// `{n+a, 2n+b, n+a+b}` (minus).
fn barnes_block(params: &EnsembleParams, p: u32) -> Float {
    let n = Float::with_val(p, params.n);
    let (a, b) = (params.alpha, params.beta);
    let two_n = Float::with_val(p, &n * 2u32);
    let term = |base: &Float, shift: f64| -> Float {
        let z = Float::with_val(p, base + shift);
        let coef = Float::with_val(p, z.square_ref()) / 2u32 - Float::with_val(p, 1) / 12u32;
        coef * z.ln()
    };
    let ab = Float::with_val(p, a) + b;
    let mut acc = term(&n, 0.0) + term(&n, b);
    acc += term(&(Float::with_val(p, &two_n + &ab)), 0.0);
    acc -= term(&n, a);
    acc -= term(&two_n, b);
    acc -= term(&(Float::with_val(p, &n + &ab)), 0.0);
    acc
}

/// `log P(t)` for large `n` and `t` near 1.
pub fn logp_near_one(t: f64, params: &EnsembleParams, ctx: &PrecisionCtx) -> Result<ExpansionResult> {
    check_t("logp_near_one", t)?;
    let p = ctx.prec();
    let n = params.n as f64;
    let (a, b) = (params.alpha, params.beta);
    let tf = Float::with_val(p, t);
    let mut v = Float::with_val(p, (-tf.clone()).ln_1p()) * (n * (n + b));
    v += Float::with_val(p, tf.ln_ref()) * (n * a);
    v += hard_edge_constant(a, ctx)?;
    v += 0.75 * a * a;
    v += barnes_block(params, p);
    Ok(ExpansionResult { value: v.to_f64(), budget: 1.0 / n + (1.0 - t).abs(), order: "through n^0, t -> 1".into() })
}

/// `log P(t)` for large `n` at fixed `t`.
pub fn logp_large_n(t: f64, params: &EnsembleParams, ctx: &PrecisionCtx) -> Result<ExpansionResult> {
    check_t("logp_large_n", t)?;
    let p = ctx.prec();
    let n = params.n as f64;
    let (a, b) = (params.alpha, params.beta);
    let tf = Float::with_val(p, t);
    let ln_omt = Float::with_val(p, (-tf.clone()).ln_1p());
    let ln_1p_rt = Float::with_val(p, tf.sqrt_ref()).ln_1p();
    let ln2 = Float::with_val(p, rug::float::Constant::Log2);
    let mut v = Float::with_val(p, &ln_omt * (n * n));
    let mut lin = Float::with_val(p, &ln_omt * b);
    lin += Float::with_val(p, &ln_1p_rt * (2.0 * a));
    lin -= Float::with_val(p, &ln2 * (2.0 * a));
    v += lin * n;
    v += Float::with_val(p, &ln_1p_rt * (a * (a + b)));
    v -= Float::with_val(p, tf.ln_ref()) * (a * a / 4.0);
    v -= Float::with_val(p, &ln2 * (a * (a + b)));
    v += 0.75 * a * a;
    v += hard_edge_constant(a, ctx)?;
    v += barnes_block(params, p);
    Ok(ExpansionResult { value: v.to_f64(), budget: 1.0 / n + 1.0 / (n * t.sqrt()), order: "through n^0".into() })
}

/// The four printed terms of the large-`n` expansion of `H_n`, ordered
/// `n^2, n^1, n^0, n^-1`.
pub fn hn_series_terms(t: f64, params: &EnsembleParams) -> [f64; 4] {
    let n = params.n as f64;
    let (a, b) = (params.alpha, params.beta);
    let rt = t.sqrt();
    [
        n * n * t,
        ((a + b) * t - a * rt) * n,
        a / 4.0 * ((a + 2.0 * b) * t - 2.0 * (a + b) * rt + a),
        a * (1.0 - t) * (1.0 + (4.0 * b * b - 1.0) * t) / (32.0 * rt * n),
    ]
}

pub fn hn_series(t: f64, params: &EnsembleParams) -> Result<ExpansionResult> {
    check_t("hn_series", t)?;
    let n = params.n as f64;
    let value = hn_series_terms(t, params).iter().sum();
    Ok(ExpansionResult { value, budget: 1.0 / (n * n * t), order: "through n^-1".into() })
}

/// The three printed terms of the large-`n` expansion of `W_n`, ordered
/// `n^-1, n^-2, n^-3`.
pub fn wn_series_terms(t: f64, params: &EnsembleParams) -> [f64; 3] {
    let n = params.n as f64;
    let (a, b) = (params.alpha, params.beta);
    let rt = t.sqrt();
    let q = t * t * (1.0 - 4.0 * b * b) + 2.0 * t * (4.0 * (a + b) * (a + b + 2.0) + 2.0 * b * b + 3.0) + 1.0;
    [a * rt / (2.0 * n), -a * (1.0 + a + b) * rt / (4.0 * n * n), a * q / (64.0 * n.powi(3) * rt)]
}

pub fn wn_series(t: f64, params: &EnsembleParams) -> Result<ExpansionResult> {
    check_t("wn_series", t)?;
    let n = params.n as f64;
    let value = wn_series_terms(t, params).iter().sum();
    Ok(ExpansionResult { value, budget: n.powi(-4), order: "through n^-3".into() })
}

/// `W_n` and `W_n'` from the large-`n` expansion through `n^-3`, at the
/// precision of `t`.
pub fn wn_series_mp(t: &Float, params: &EnsembleParams) -> (Float, Float) {
    let p = t.prec();
    let n = params.n as f64;
    let (a, b) = (params.alpha, params.beta);
    let rt = Float::with_val(p, t.sqrt_ref());
    let inv_rt = Float::with_val(p, rt.recip_ref());
    let c1 = a / (2.0 * n);
    let c2 = -a * (1.0 + a + b) / (4.0 * n * n);
    let c3 = a / (64.0 * n.powi(3));
    let k2 = 1.0 - 4.0 * b * b;
    let k1 = 2.0 * (4.0 * (a + b) * (a + b + 2.0) + 2.0 * b * b + 3.0);
    let mut q = Float::with_val(p, t.square_ref()) * k2;
    q += Float::with_val(p, t * k1);
    q += 1u32;
    let qp = Float::with_val(p, t * (2.0 * k2)) + k1;

    let mut w = Float::with_val(p, &rt * (c1 + c2));
    w += Float::with_val(p, &q * &inv_rt) * c3;
    // d/dt sqrt(t) = 1/(2 sqrt t); d/dt q/sqrt(t) = q'/sqrt(t) - q/(2 t^(3/2))
    let mut wp = Float::with_val(p, &inv_rt * ((c1 + c2) / 2.0));
    let mut d3 = Float::with_val(p, &qp * &inv_rt);
    d3 -= Float::with_val(p, &q * &inv_rt) / Float::with_val(p, t * 2u32);
    wp += d3 * c3;
    (w, wp)
}

/// Large-gap expansion of the symmetric-ensemble log-probability through `b^-4`.
pub fn sym_gap_series(b: f64, ctx: &PrecisionCtx) -> Result<ExpansionResult> {
    if !(b > 0.0) {
        return Err(domain("sym_gap_series", format!("b = {b} must be positive")));
    }
    let p = ctx.prec();
    let bf = Float::with_val(p, b);
    let mut v = -Float::with_val(p, bf.square_ref()) / 2u32;
    v -= Float::with_val(p, bf.ln_ref()) / 4u32;
    v += sym_gap_constant(ctx);
    v += 1.0 / (32.0 * b * b);
    v += 5.0 / (128.0 * b.powi(4));
    Ok(ExpansionResult { value: v.to_f64(), budget: b.powi(-6), order: "through b^-4".into() })
}

/// `(log 2) / 12 + 3 zeta'(-1)`.
pub fn sym_gap_constant(ctx: &PrecisionCtx) -> Float {
    let p = ctx.prec();
    let ln2 = Float::with_val(p, rug::float::Constant::Log2);
    ln2 / 12u32 + zeta_prime_minus_one_mp(p) * 3u32
}
