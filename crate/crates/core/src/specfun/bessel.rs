use rug::Float;

use crate::error::{domain, Result};
use crate::precision::{PrecisionCtx, ToReal};

use super::gamma::log_gamma_mp;

/// The regularised function `g(x) = x^(-alpha/2) J_alpha(sqrt x)` and its
/// first three derivatives in `x`, evaluated from the entire power series
/// `g(x) = 2^-alpha sum_k (-x/4)^k / (k! Gamma(k + alpha + 1))`.
#[derive(Debug, Clone)]
pub struct BesselSeries {
    pub g: Float,
    pub dg: Float,
    pub d2g: Float,
    pub d3g: Float,
}

/// Extra bits needed to absorb cancellation in the alternating series at `x`.
fn cancellation_bits(x: f64) -> u32 {
    (x.max(0.0).sqrt() * std::f64::consts::LOG2_E).ceil() as u32 + 16
}

impl BesselSeries {
    /// Evaluates at `x >= 0`; the result has precision `prec`.
    pub fn eval(alpha: f64, x: &Float, prec: u32) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(domain("bessel_pair", format!("alpha = {alpha} must exceed -1")));
        }
        if x.is_sign_negative() && !x.is_zero() {
            return Err(domain("bessel_pair", "argument must be non-negative"));
        }
        let xf = x.to_f64();
        let wp = prec + cancellation_bits(xf);
        let xw = Float::with_val(wp, x);
        let a = Float::with_val(wp, alpha);
        let ln2 = Float::with_val(wp, rug::float::Constant::Log2);
        let mut c = -(Float::with_val(wp, &a * &ln2) + log_gamma_mp(&Float::with_val(wp, &a + 1u32))?);
        c.exp_mut();

        // Coefficients c_k of g; stop once terms are negligible past the peak.
        let mut coeffs = vec![c.clone()];
        let ln_x = if xf > 0.0 { xf.ln() } else { f64::NEG_INFINITY };
        let mut ln_term = 0.0f64;
        let mut ln_peak = 0.0f64;
        let cut = (wp as f64 + 8.0) * std::f64::consts::LN_2;
        for k in 1u32.. {
            let kf = k as f64;
            c /= Float::with_val(wp, &a + k) * k;
            c /= -4i32;
            coeffs.push(c.clone());
            ln_term += ln_x - (4.0 * kf * (kf + alpha)).ln();
            ln_peak = ln_peak.max(ln_term);
            let past_peak = kf > xf.sqrt() / 2.0 + 4.0;
            if past_peak && (ln_term + 3.0 * kf.ln() < ln_peak - cut || xf == 0.0) {
                break;
            }
        }

        let horner = |order: usize| -> Float {
            let mut acc = Float::new(wp);
            for k in (order..coeffs.len()).rev() {
                acc *= &xw;
                let falling: u32 = (0..order as u32).map(|i| k as u32 - i).product();
                acc += Float::with_val(wp, &coeffs[k] * falling);
            }
            Float::with_val(prec, acc)
        };
        Ok(Self { g: horner(0), dg: horner(1), d2g: horner(2), d3g: horner(3) })
    }

    /// `h(x) = x^(-alpha/2) sqrt(x) J'_alpha(sqrt x) = alpha g + 2 x g'`.
    pub fn h(&self, alpha: f64, x: &Float) -> Float {
        let prec = self.g.prec();
        Float::with_val(prec, &self.g * alpha) + Float::with_val(prec, x * &self.dg) * 2u32
    }
}

/// The pair `(g_alpha(x), h_alpha(x))` entering the Bessel kernel.
pub fn bessel_pair(alpha: f64, x: impl ToReal, ctx: &PrecisionCtx) -> Result<(Float, Float)> {
    let x = x.to_real(ctx.prec());
    let s = BesselSeries::eval(alpha, &x, ctx.prec())?;
    let h = s.h(alpha, &x);
    Ok((s.g, h))
}
