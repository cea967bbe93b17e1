#![allow(dead_code)]

use rug::float::Constant;
use rug::Float;

/// Tanh-sinh quadrature of `f` over `(a, b)` at precision `prec`.
/// Handles algebraic endpoint singularities; `f` receives the point and its
/// distances to both endpoints so that `(1 - x)^q` can be formed without cancellation.
pub fn tanh_sinh(prec: u32, a: &Float, b: &Float, f: impl Fn(&Float, &Float, &Float) -> Float) -> Float {
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    let c = Float::with_val(prec, b - a) / 2u32;
    let mid = Float::with_val(prec, a + b) / 2u32;
    let tiny = Float::with_val(prec, 1) >> (prec + 20);
    let mut prev: Option<Float> = None;
    let mut h = Float::with_val(prec, 1) >> 2;
    for _level in 0..14 {
        let mut sum = Float::new(prec);
        let mut k: i64 = 0;
        loop {
            let t = Float::with_val(prec, &h * k);
            let sh = Float::with_val(prec, t.sinh_ref()) * &half_pi;
            let ch = Float::with_val(prec, t.cosh_ref()) * &half_pi;
            let cosh_sh = Float::with_val(prec, sh.cosh_ref());
            // 1 - tanh(u) = 2 / (1 + exp(2u))
            let e2 = Float::with_val(prec, Float::with_val(prec, &sh * 2u32).exp_ref());
            let one_minus = Float::with_val(prec, 2u32) / (Float::with_val(prec, &e2 + 1u32));
            let w = Float::with_val(prec, &ch / Float::with_val(prec, cosh_sh.square_ref()));
            let weight = Float::with_val(prec, &w * &c);
            if weight < tiny || one_minus.is_zero() {
                break;
            }
            // right point: distance to b is c*(1 - tanh), to a is c*(1 + tanh)
            let dist_small = Float::with_val(prec, &c * &one_minus);
            let dist_big = Float::with_val(prec, &c * 2u32) - &dist_small;
            let xr = Float::with_val(prec, b - &dist_small);
            let xl = Float::with_val(prec, a + &dist_small);
            let fr = f(&xr, &dist_big, &dist_small);
            if k == 0 {
                sum += fr * &weight;
            } else {
                let fl = f(&xl, &dist_small, &dist_big);
                sum += (fr + fl) * &weight;
            }
            k += 1;
            let _ = &mid;
        }
        sum *= &h;
        if let Some(p) = &prev {
            let diff = Float::with_val(prec, &sum - p).abs();
            let scale = Float::with_val(prec, sum.abs_ref());
            if diff < Float::with_val(prec, &scale >> (prec * 3 / 4)) {
                return sum;
            }
        }
        prev = Some(sum);
        h >>= 1;
    }
    prev.unwrap()
}

pub fn rel_err(a: &Float, b: &Float) -> f64 {
    let d = Float::with_val(a.prec(), a - b).abs();
    (d / Float::with_val(a.prec(), b.abs_ref())).to_f64()
}
