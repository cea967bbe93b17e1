use std::sync::{Mutex, OnceLock};

use rug::{Float, Integer, Rational};

use crate::error::{domain, Result};
use crate::precision::{PrecisionCtx, ToReal};

/// `log Gamma(x)` for `x > 0`.
pub fn log_gamma(x: impl ToReal, ctx: &PrecisionCtx) -> Result<Float> {
    let x = x.to_real(ctx.prec());
    log_gamma_mp(&x)
}

pub(crate) fn log_gamma_mp(x: &Float) -> Result<Float> {
    if !(x.is_finite() && x.is_sign_positive() && !x.is_zero()) {
        return Err(domain("log_gamma", format!("argument {} must be positive", x.to_f64())));
    }
    Ok(Float::with_val(x.prec(), x.ln_gamma_ref()))
}

static BERNOULLI: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();

/// Even Bernoulli numbers `B_2, B_4, ..., B_{2k}` (index `j` holds `B_{2j+2}`),
/// from the integer tangent-number recurrence.
fn tangent_bernoulli(k: usize) -> Vec<Rational> {
    let mut t: Vec<Integer> = vec![Integer::new(); k + 1];
    if k == 0 {
        return Vec::new();
    }
    t[1] = Integer::from(1);
    for j in 2..=k {
        t[j] = Integer::from(&t[j - 1] * (j as u32 - 1));
    }
    for i in 2..=k {
        for j in i..=k {
            let a = Integer::from(&t[j - 1] * (j - i) as u32);
            let b = Integer::from(&t[j] * (j - i + 2) as u32);
            t[j] = a + b;
        }
    }
    (1..=k)
        .map(|j| {
            let pow = Integer::from(1) << (2 * j as u32);
            let den = Integer::from(&pow * Integer::from(&pow - 1u32));
            let num = Integer::from(&t[j] * (2 * j as u32));
            let b = Rational::from((num, den));
            if j % 2 == 0 { -b } else { b }
        })
        .collect()
}

/// `B_{2j}` for `j >= 1`.
pub fn bernoulli_even(j: usize) -> Rational {
    assert!(j >= 1);
    let cache = BERNOULLI.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().expect("bernoulli cache poisoned");
    if guard.len() < j {
        let want = j.max(2 * guard.len()).max(32);
        *guard = tangent_bernoulli(want);
    }
    guard[j - 1].clone()
}

/// Argument above which the Stirling-type series is summed directly.
/// The smallest term of both series is about `exp(-2 pi w)`.
fn asymptotic_threshold(prec: u32) -> f64 {
    (0.1104 * prec as f64).ceil() + 2.0
}

/// `log A` (Glaisher-Kinkelin constant) from the Euler-Maclaurin expansion
/// of the hyperfactorial.
fn log_glaisher(prec: u32) -> Float {
    let big_n = asymptotic_threshold(prec) as u32;
    let nf = Float::with_val(prec, big_n);
    let mut s = Float::new(prec);
    for k in 2..=big_n {
        let kf = Float::with_val(prec, k);
        s += Float::with_val(prec, kf.ln_ref()) * k;
    }
    let ln_n = Float::with_val(prec, nf.ln_ref());
    let n2 = Float::with_val(prec, nf.square_ref());
    let mut poly = Float::with_val(prec, &n2 / 2u32) + Float::with_val(prec, &nf / 2u32);
    poly += Float::with_val(prec, 1) / 12u32;
    s -= poly * &ln_n;
    s += n2.clone() / 4u32;
    let eps = Float::with_val(prec, 1) >> prec;
    let inv_n2 = Float::with_val(prec, 1) / &n2;
    let mut pow = Float::with_val(prec, &inv_n2);
    let mut last = Float::with_val(prec, f64::INFINITY);
    for j in 2.. {
        let b = Float::with_val(prec, &bernoulli_even(j));
        let den = (2 * j * (2 * j - 1) * (2 * j - 2)) as u32;
        let term = b * &pow / den;
        let mag = Float::with_val(prec, term.abs_ref());
        if mag > last {
            break;
        }
        s += &term;
        if mag < eps {
            break;
        }
        last = mag;
        pow *= &inv_n2;
    }
    s
}

/// `zeta'(-1) = 1/12 - log A`.
pub fn zeta_prime_minus_one(ctx: &PrecisionCtx) -> Float {
    zeta_prime_minus_one_mp(ctx.prec())
}

pub(crate) fn zeta_prime_minus_one_mp(prec: u32) -> Float {
    Float::with_val(prec, 1) / 12u32 - log_glaisher(prec)
}

/// `log G(w + 1)` from the large-argument series.
fn log_barnes_asymptotic(w: &Float, zp: &Float) -> Float {
    let prec = w.prec();
    let ln_w = Float::with_val(prec, w.ln_ref());
    let w2 = Float::with_val(prec, w.square_ref());
    let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
    let mut acc = Float::with_val(prec, &ln_w / 2u32) - Float::with_val(prec, 3) / 4u32;
    acc *= &w2;
    acc += Float::with_val(prec, w / 2u32) * two_pi.ln();
    acc -= Float::with_val(prec, &ln_w / 12u32);
    acc += zp;
    let eps = Float::with_val(prec, 1) >> prec;
    let inv_w2 = Float::with_val(prec, 1) / &w2;
    let mut pow = inv_w2.clone();
    let mut last = Float::with_val(prec, f64::INFINITY);
    for k in 1.. {
        let b = Float::with_val(prec, &bernoulli_even(k + 1));
        let term = b * &pow / (4 * k * (k + 1)) as u32;
        let mag = Float::with_val(prec, term.abs_ref());
        if mag > last {
            break;
        }
        acc += &term;
        if mag < eps {
            break;
        }
        last = mag;
        pow *= &inv_w2;
    }
    acc
}

/// Barnes `log G(z)` for `z > 0`, by upward recursion
/// `G(z+1) = Gamma(z) G(z)` to the asymptotic regime.
pub fn log_barnes_g(z: impl ToReal, ctx: &PrecisionCtx) -> Result<Float> {
    let z = z.to_real(ctx.prec());
    log_barnes_g_mp(&z)
}

pub(crate) fn log_barnes_g_mp(z: &Float) -> Result<Float> {
    if !(z.is_finite() && z.is_sign_positive() && !z.is_zero()) {
        return Err(domain("log_barnes_g", format!("argument {} must be positive", z.to_f64())));
    }
    let prec = z.prec();
    let zp = zeta_prime_minus_one_mp(prec);
    log_barnes_g_with(z, &zp, asymptotic_threshold(prec))
}

/// Recursion-plus-series evaluation with an explicit splice point; exposed
/// so the two routes can be compared against each other.
pub fn log_barnes_g_spliced(z: impl ToReal, splice: f64, ctx: &PrecisionCtx) -> Result<Float> {
    let z = z.to_real(ctx.prec());
    if !(z.is_finite() && z.is_sign_positive() && !z.is_zero()) {
        return Err(domain("log_barnes_g", "argument must be positive"));
    }
    let zp = zeta_prime_minus_one_mp(ctx.prec());
    log_barnes_g_with(&z, &zp, splice)
}

fn log_barnes_g_with(z: &Float, zp: &Float, threshold: f64) -> Result<Float> {
    let prec = z.prec();
    let zf = z.to_f64();
    let shift = if zf - 1.0 >= threshold { 0 } else { (threshold + 1.0 - zf).ceil() as u32 };
    let top = Float::with_val(prec, z + shift);
    let mut acc = log_barnes_asymptotic(&Float::with_val(prec, &top - 1u32), zp);
    for j in 0..shift {
        acc -= log_gamma_mp(&Float::with_val(prec, z + j))?;
    }
    Ok(acc)
}
