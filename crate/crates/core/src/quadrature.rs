//! Gauss rules by the Golub-Welsch eigenvalue method.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::tridiagonal_eigen;
use crate::precision::PrecisionCtx;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuadKind {
    /// Unit weight.
    Legendre,
    /// Weight `(x - lo)^a`, `a > -1`.
    Jacobi(f64),
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub kind: QuadKind,
    pub domain: (f64, f64),
    /// Strictly increasing, inside the open domain.
    pub nodes: Vec<Float>,
    /// Strictly positive.
    pub weights: Vec<Float>,
}

impl QuadratureRule {
    /// `sum_i w_i f(x_i)`.
    pub fn integrate(&self, mut f: impl FnMut(&Float) -> Float) -> Float {
        let prec = self.nodes.first().map_or(53, Float::prec);
        let mut acc = Float::new(prec);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(x) * w;
        }
        acc
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `m`-point Gauss rule of the given kind on `domain`.
pub fn quad_rule(kind: QuadKind, m: usize, domain: (f64, f64), ctx: &PrecisionCtx) -> Result<QuadratureRule> {
    let (lo, hi) = domain;
    if m == 0 {
        return Err(domain_err("at least one node required"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(domain_err(format!("invalid interval ({lo}, {hi})")));
    }
    let b = match kind {
        QuadKind::Legendre => 0.0,
        QuadKind::Jacobi(a) if a > -1.0 => a,
        QuadKind::Jacobi(a) => return Err(domain_err(format!("Jacobi exponent {a} must exceed -1"))),
    };
    let prec = ctx.prec() + 16;
    // Jacobi matrix for the weight (1 + u)^b on (-1, 1).
    let bf = Float::with_val(prec, b);
    let b2 = Float::with_val(prec, bf.square_ref());
    let mut diag = Vec::with_capacity(m);
    diag.push(Float::with_val(prec, &bf / Float::with_val(prec, &bf + 2u32)));
    for k in 1..m as u32 {
        let s = Float::with_val(prec, &bf + 2 * k);
        diag.push(Float::with_val(prec, &b2 / (Float::with_val(prec, &s * Float::with_val(prec, &s + 2u32)))));
    }
    let mut off = Vec::with_capacity(m.saturating_sub(1));
    for k in 1..m as u32 {
        let s = Float::with_val(prec, &bf + 2 * k);
        let mut num = Float::with_val(prec, &bf + k) * (4 * k);
        num *= Float::with_val(prec, &bf + k) * k;
        let mut den = Float::with_val(prec, s.square_ref());
        den *= Float::with_val(prec, &s + 1u32) * Float::with_val(prec, &s - 1u32);
        off.push((num / den).sqrt());
    }
    let (u, z) = tridiagonal_eigen(diag, &off, true)?;
    let z = z.expect("first components requested");

    // total mass 2^(b+1) Gamma(1) Gamma(b+1) / Gamma(b+2) = 2^(b+1) / (b+1)
    let half = Float::with_val(prec, hi - lo) / 2u32;
    let mut scale = Float::with_val(prec, half.ln_ref()) * Float::with_val(prec, &bf + 1u32);
    scale.exp_mut();
    let mass = Float::with_val(prec, Float::with_val(prec, &bf + 1u32).exp2_ref()) / Float::with_val(prec, &bf + 1u32);
    let out = ctx.prec();
    let nodes: Vec<Float> = u.iter().map(|ui| Float::with_val(out, Float::with_val(prec, ui + 1u32) * &half + lo)).collect();
    let weights: Vec<Float> = z.iter().map(|zi| Float::with_val(out, Float::with_val(prec, zi.square_ref()) * &mass * &scale)).collect();
    Ok(QuadratureRule { kind, domain, nodes, weights })
}

fn domain_err(msg: impl Into<String>) -> crate::error::Error {
    domain("quad_rule", msg)
}
