//! Nystrom evaluation of the Bessel-kernel Fredholm determinant on `(0, s)`.
//!
//! The kernel is written as `K(x, y) = (xy)^(alpha/2) G(x, y)` with `G`
//! entire, and the factor `(xy)^(alpha/2)` is absorbed into a Gauss-Jacobi
//! rule of weight `x^alpha`, so the discretisation converges spectrally for
//! every `alpha > -1`.

use rayon::prelude::*;
use rug::Float;

use crate::error::{domain, Error, Result};
use crate::linalg::{symmetric_eigenvalues, FMatrix};
use crate::precision::{PrecisionCtx, ToReal};
use crate::quadrature::{quad_rule, QuadKind, QuadratureRule};
use crate::specfun::BesselSeries;

/// Relative separation below which `kernel_g` uses the diagonal expansion.
pub const DIAGONAL_DELTA: f64 = 1e-6;

/// `ceil(10 + 2.2 sqrt(s))` quadrature points.
pub fn default_points(s: f64) -> usize {
    (10.0 + 2.2 * s.max(0.0).sqrt()).ceil() as usize
}

/// `G(x, x)` and `dG/dy` at `y = x` from the series of `g`.
fn diagonal(x: &Float, b: &BesselSeries) -> (Float, Float) {
    let p = x.prec();
    // G(x, x) = x g'^2 - g g' - x g g''
    let mut d = Float::with_val(p, b.dg.square_ref()) * x;
    d -= Float::with_val(p, &b.g * &b.dg);
    d -= Float::with_val(p, &b.g * &b.d2g) * x;
    // dG/dy = -(2 g g'' + x g g''' - x g' g'') / 2
    let mut n2 = Float::with_val(p, &b.g * &b.d2g) * 2u32;
    n2 += Float::with_val(p, &b.g * &b.d3g) * x;
    n2 -= Float::with_val(p, &b.dg * &b.d2g) * x;
    (d, -n2 / 2u32)
}

/// `[y g(x) g'(y) - x g'(x) g(y)] / (x - y)` for well-separated points.
fn off_diagonal(x: &Float, bx: &BesselSeries, y: &Float, by: &BesselSeries) -> Float {
    let p = x.prec();
    let mut num = Float::with_val(p, &bx.g * &by.dg) * y;
    num -= Float::with_val(p, &bx.dg * &by.g) * x;
    num / Float::with_val(p, x - y)
}

fn near_diagonal(x: &Float, y: &Float) -> bool {
    let gap = Float::with_val(x.prec(), x - y).abs().to_f64();
    gap <= DIAGONAL_DELTA * x.to_f64().max(1.0)
}

fn kernel_from_series(x: &Float, bx: &BesselSeries, y: &Float, by: &BesselSeries) -> Float {
    if near_diagonal(x, y) {
        let (d, slope) = diagonal(x, bx);
        d + slope * Float::with_val(x.prec(), y - x)
    } else {
        off_diagonal(x, bx, y, by)
    }
}

/// The smooth part `G(x, y) = [g(x) h(y) - h(x) g(y)] / (2 (x - y))` of the
/// Bessel kernel, with `(xy)^(alpha/2)` factored off.
pub fn kernel_g(alpha: f64, x: impl ToReal, y: impl ToReal, ctx: &PrecisionCtx) -> Result<Float> {
    let p = ctx.prec();
    let (x, y) = (x.to_real(p), y.to_real(p));
    if x.is_sign_negative() && !x.is_zero() || y.is_sign_negative() && !y.is_zero() {
        return Err(domain("kernel_g", "arguments must be non-negative"));
    }
    let bx = BesselSeries::eval(alpha, &x, p)?;
    let by = BesselSeries::eval(alpha, &y, p)?;
    Ok(kernel_from_series(&x, &bx, &y, &by))
}

#[derive(Debug, Clone)]
pub struct NystromDiscretization {
    pub s: f64,
    pub alpha: f64,
    pub m: usize,
    pub rule: QuadratureRule,
    /// `sqrt(w_i w_j) G(x_i, x_j)`.
    pub matrix: FMatrix,
}

impl NystromDiscretization {
    pub fn new(s: f64, alpha: f64, m: usize, ctx: &PrecisionCtx) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(domain("log_fredholm_det", format!("s = {s} must be positive")));
        }
        if !(alpha > -1.0) {
            return Err(domain("log_fredholm_det", format!("alpha = {alpha} must exceed -1")));
        }
        if m < 4 {
            return Err(domain("log_fredholm_det", format!("m = {m} must be at least 4")));
        }
        let rule = quad_rule(QuadKind::Jacobi(alpha), m, (0.0, s), ctx)?;
        let p = ctx.prec();
        let series: Vec<BesselSeries> =
            rule.nodes.par_iter().map(|x| BesselSeries::eval(alpha, x, p)).collect::<Result<_>>()?;
        let roots: Vec<Float> = rule.weights.iter().map(|w| Float::with_val(p, w.sqrt_ref())).collect();
        let rows: Vec<Vec<Float>> = (0..m)
            .into_par_iter()
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let (a, b) = if i <= j { (i, j) } else { (j, i) };
                        let g = kernel_from_series(&rule.nodes[a], &series[a], &rule.nodes[b], &series[b]);
                        // same operation order for (i, j) and (j, i) keeps the matrix exactly symmetric
                        g * &roots[a] * &roots[b]
                    })
                    .collect()
            })
            .collect();
        let matrix = FMatrix::from_fn(m, m, |i, j| rows[i][j].clone());
        Ok(Self { s, alpha, m, rule, matrix })
    }

    /// Eigenvalues of the discretised operator, ascending. Fails when one
    /// leaves `[0, 1)` by more than rounding.
    pub fn eigenvalues(&self) -> Result<Vec<Float>> {
        let ev = symmetric_eigenvalues(self.matrix.clone())?;
        let slack = 2f64.powf(-(self.matrix.prec() as f64) / 2.0);
        if let Some(bad) = ev.iter().find(|l| **l >= 1u32 || l.to_f64() < -slack) {
            return Err(Error::Contraction { eigenvalue: bad.to_f64(), m: self.m });
        }
        Ok(ev)
    }

    /// `log det(I - K) = sum_i log(1 - lambda_i)`.
    pub fn log_det(&self) -> Result<Float> {
        let p = self.matrix.prec();
        let mut acc = Float::new(p);
        for l in self.eigenvalues()? {
            acc += (-l).ln_1p();
        }
        Ok(acc)
    }
}

/// `log det(I - K_Bessel)` on `(0, s)` from an `m`-point Nystrom rule.
pub fn log_fredholm_det(s: f64, alpha: f64, m: usize, ctx: &PrecisionCtx) -> Result<Float> {
    NystromDiscretization::new(s, alpha, m, ctx)?.log_det()
}

#[derive(Debug, Clone)]
pub struct DoublingCheck {
    pub value: Float,
    pub doubled: Float,
    /// `|value - doubled|`.
    pub change: f64,
}

/// Evaluates with `m` and `2m` points; the change estimates the
/// discretisation error of the `m`-point value.
pub fn log_fredholm_det_checked(s: f64, alpha: f64, m: usize, ctx: &PrecisionCtx) -> Result<DoublingCheck> {
    let (a, b) = rayon::join(|| log_fredholm_det(s, alpha, m, ctx), || log_fredholm_det(s, alpha, 2 * m, ctx));
    let (value, doubled) = (a?, b?);
    let change = Float::with_val(value.prec(), &value - &doubled).abs().to_f64();
    Ok(DoublingCheck { value, doubled, change })
}
