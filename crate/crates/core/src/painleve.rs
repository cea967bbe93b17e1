//! Painleve VI route to finite-`n` quantities.
//!
//! `W_n(t) = 1 - (1 - t) x_n(t) / A_n` satisfies a Painleve VI equation with
//! `W_n(0) = 0`, `W_n'(0) = 1`. Those two conditions leave a one-parameter
//! family `W = t + c t^(1 + alpha) + ...` near the origin, so the
//! integration is seeded from the linear response of `x_n` at `t = 0` to the
//! removed moment mass on `(0, t_0)`, which fixes `c`.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::asymptotics::wn_series_mp;
use crate::error::{domain, Error, Result};
use crate::finite_n::{AuxQuantities, EnsembleParams, ZeroResponse};
use crate::ode::{Gbs, GbsOptions};
use crate::precision::{PrecisionCtx, ToReal};
use crate::specfun::log_lower_moment_mp;

/// Distance to `W in {0, 1, t}` below which a sampled point is rejected.
pub const POLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedMode {
    /// Start just right of `t = 0` from the moment-perturbation expansion.
    SeriesAtZero,
    /// Start at the first grid point from the large-`n` expansion of `W_n`.
    LargeNSeed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegratorOptions {
    /// Local error tolerance per step (relative, with a small absolute floor).
    pub tol: f64,
    /// Seed offset for `SeriesAtZero`; chosen from the precision when `None`.
    pub seed_t0: Option<f64>,
    /// Repeat the integration from `t_0 / 2` and compare.
    pub verify_seed: bool,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { tol: 1e-12, seed_t0: None, verify_seed: true }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrajectoryDiagnostics {
    pub steps: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub min_step: f64,
    /// Smallest distance of a sampled `W` to `{0, 1, t}`.
    pub min_pole_distance: f64,
    /// Set when `min_pole_distance < 1e-6`.
    pub pole_proximity: bool,
    pub seed_t: f64,
    /// Largest relative change of `W` on the grid under seed-offset halving.
    pub seed_halving_change: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PainleveTrajectory {
    pub params: EnsembleParams,
    pub grid: Vec<f64>,
    pub w: Vec<Float>,
    pub wp: Vec<Float>,
    pub seed_mode: SeedMode,
    pub diagnostics: TrajectoryDiagnostics,
}

fn inv(x: &Float) -> Float {
    Float::with_val(x.prec(), x.recip_ref())
}

/// Second derivative of `W` from the Painleve VI equation.
pub fn w_second_derivative(t: &Float, w: &Float, wp: &Float, params: &EnsembleParams) -> Float {
    let p = w.prec();
    let u = Float::with_val(p, w - t);
    let v = Float::with_val(p, wp - 1u32);
    pvi_rhs(t, &u, &v, params)
}

/// The Painleve VI right-hand side in the offset variables `u = W - t`,
/// `v = W' - 1`. The terms singular in `1/u` are combined by hand so that
/// their leading parts cancel exactly, which keeps the evaluation accurate
/// while `u` is tiny near the seed.
fn pvi_rhs(t: &Float, u: &Float, v: &Float, params: &EnsembleParams) -> Float {
    let p = u.prec();
    let a_n = params.a_n_mp(p);
    let w = Float::with_val(p, t + u);
    let wp = Float::with_val(p, v + 1u32);
    let wm1 = Float::with_val(p, &w - 1u32);
    let tm1 = Float::with_val(p, t - 1u32);
    let tt = Float::with_val(p, t * &tm1);

    let mut out = (inv(&w) + inv(&wm1)) * Float::with_val(p, wp.square_ref()) / 2u32;
    out -= (inv(t) + inv(&tm1)) * &wp;
    // W'^2/(2u) - W'/u + W(W-1)/(2u t(t-1)) = v^2/(2u) + (2t - 1 + u)/(2 t(t-1))
    out += Float::with_val(p, v.square_ref()) / Float::with_val(p, u * 2u32);
    let mut lin = Float::with_val(p, t * 2u32) - 1u32;
    lin += u;
    out += lin / Float::with_val(p, &tt * 2u32);

    let mut bracket = Float::with_val(p, a_n.square_ref()) / 2u32;
    bracket -= Float::with_val(p, t * (params.alpha * params.alpha)) / (Float::with_val(p, w.square_ref()) * 2u32);
    bracket += Float::with_val(p, &tm1 * (params.beta * params.beta)) / (Float::with_val(p, wm1.square_ref()) * 2u32);
    let mut cubic = Float::with_val(p, &w * &wm1) * u;
    cubic /= Float::with_val(p, tt.square_ref());
    out += cubic * bracket;
    out
}

fn distance_to_singular_set(t: &Float, w: &Float) -> (f64, &'static str) {
    let p = w.prec();
    let d0 = w.to_f64().abs();
    let d1 = Float::with_val(p, w - 1u32).to_f64().abs();
    let dt = Float::with_val(p, w - t).to_f64().abs();
    let mut best = (d0, "W = 0");
    if d1 < best.0 {
        best = (d1, "W = 1");
    }
    if dt < best.0 {
        best = (dt, "W = t");
    }
    best
}

fn check_sample(t: &Float, w: &Float) -> Result<f64> {
    let (d, manifold) = distance_to_singular_set(t, w);
    if !(d >= POLE_TOLERANCE) {
        return Err(Error::PoleProximity { t: t.to_f64(), manifold, distance: d });
    }
    Ok(d)
}

/// `H_n` from `W_n`, `W_n'`.
pub fn hn_from_w(t: impl ToReal, w: &Float, wp: &Float, params: &EnsembleParams) -> Result<Float> {
    let p = w.prec();
    let t = t.to_real(p);
    check_sample(&t, w)?;
    let a_n = params.a_n_mp(p);
    let (alpha, beta) = (params.alpha, params.beta);
    let wm1 = Float::with_val(p, w - 1u32);
    let wmt = Float::with_val(p, w - &t);
    let tm1 = Float::with_val(p, &t - 1u32);
    let t1mt = Float::with_val(p, &t * Float::with_val(p, 1u32 - &t));

    let mut h = Float::with_val(p, t1mt.square_ref()) * Float::with_val(p, wp.square_ref());
    h /= Float::with_val(p, w * &wm1) * &wmt * 4u32;
    h += Float::with_val(p, &t1mt * wp) / Float::with_val(p, &wmt * 2u32);
    let m = Float::with_val(p, &a_n - 2u32); // 2n - 1 + alpha + beta
    h -= Float::with_val(p, &a_n * &m) * w / 4u32;
    let s = Float::with_val(p, &a_n - 1u32); // 2n + alpha + beta
    let mut c = Float::with_val(p, s.square_ref()) + 1u32;
    c *= &t;
    c += alpha * alpha - beta * beta - 1.0;
    h += c / 4u32;
    h -= Float::with_val(p, &t * (alpha * alpha)) / Float::with_val(p, w * 4u32);
    h += Float::with_val(p, &tm1 * (beta * beta)) / Float::with_val(p, &wm1 * 4u32);
    h += Float::with_val(p, &t * &tm1) / Float::with_val(p, &wmt * 4u32);
    Ok(h)
}

/// `F(x, x', t) = [t (1 - t) x' + (x - A_n)(beta - (1 - t) x)] / (2 x)`.
fn f_aux(t: &Float, x: &Float, xp: &Float, params: &EnsembleParams) -> Float {
    let p = x.prec();
    let a_n = params.a_n_mp(p);
    let omt = Float::with_val(p, 1u32 - t);
    let mut num = Float::with_val(p, t * &omt) * xp;
    let b_term = Float::with_val(p, params.beta) - Float::with_val(p, &omt * x);
    num += Float::with_val(p, x - &a_n) * b_term;
    num / Float::with_val(p, x * 2u32)
}

/// `y_n` from `x_n`, `x_n'`.
pub fn y_from_x(t: impl ToReal, x: &Float, xp: &Float, params: &EnsembleParams) -> Result<Float> {
    let p = x.prec();
    let t = t.to_real(p);
    let a_n = params.a_n_mp(p);
    let xma = Float::with_val(p, x - &a_n);
    let omt_x_ma = Float::with_val(p, Float::with_val(p, 1u32 - &t) * x) - &a_n;
    if x.is_zero() || xma.is_zero() || omt_x_ma.is_zero() {
        return Err(Error::Degenerate { quantity: "x_n denominators", t: t.to_f64() });
    }
    let n = params.n as f64;
    let f = f_aux(&t, x, xp, params);
    let mut inner = Float::with_val(p, x * Float::with_val(p, f.square_ref()));
    let mut lin = Float::with_val(p, &f * (2.0 * n + params.alpha));
    lin += Float::with_val(p, &t * (n * (n + params.alpha)));
    inner += Float::with_val(p, &xma * lin);
    let num = Float::with_val(p, x * inner);
    let den = Float::with_val(p, &xma * &omt_x_ma) * (2.0 * n + params.alpha + params.beta);
    Ok(-(num / den))
}

/// `r_n` from `x_n`, `x_n'`, `y_n`.
pub fn r_from_xy(t: impl ToReal, x: &Float, xp: &Float, y: &Float, params: &EnsembleParams) -> Result<Float> {
    let p = x.prec();
    let t = t.to_real(p);
    if x.is_zero() || t.is_zero() {
        return Err(Error::Degenerate { quantity: "x_n or t", t: t.to_f64() });
    }
    let a_n = params.a_n_mp(p);
    let omt = Float::with_val(p, 1u32 - &t);
    let mut r = Float::with_val(p, -0.5);
    r += (Float::with_val(p, &omt * xp) + &a_n) / Float::with_val(p, x * 2u32);
    let mut k = Float::with_val(p, y * 2u32) + params.beta;
    k -= Float::with_val(p, &omt * x);
    k += &t;
    k *= Float::with_val(p, &a_n - x);
    r -= k / (Float::with_val(p, &t * x) * 2u32);
    Ok(r)
}

/// `H_n = (2n + alpha + beta)(y_n - t r_n) - n(n + alpha)`.
pub fn h_from_yr(t: impl ToReal, y: &Float, r: &Float, params: &EnsembleParams) -> Float {
    let p = y.prec();
    let t = t.to_real(p);
    let n = params.n as f64;
    let s = 2.0 * n + params.alpha + params.beta;
    (Float::with_val(p, y - Float::with_val(p, &t * r)) * s) - n * (n + params.alpha)
}

/// `H_n` from `x_n`, `x_n'`, `y_n`.
pub fn h_from_xy(t: impl ToReal, x: &Float, xp: &Float, y: &Float, params: &EnsembleParams) -> Float {
    let p = x.prec();
    let t = t.to_real(p);
    let a_n = params.a_n_mp(p);
    let n = params.n as f64;
    let s = 2.0 * n + params.alpha + params.beta;
    let omt = Float::with_val(p, 1u32 - &t);
    let mut inner = Float::with_val(p, &a_n * y) * 2u32;
    inner -= Float::with_val(p, &t * &omt) * xp;
    let q = Float::with_val(p, &omt * x) - params.beta;
    inner += Float::with_val(p, x - &a_n) * q;
    inner * s / Float::with_val(p, x * 2u32) - n * (n + params.alpha)
}

/// `x_n`, its derivative, `y_n` and `r_n` recovered from `W_n`, `W_n'`.
/// `R_n` is not determined by this route and is returned as NaN.
pub fn aux_from_w(t: impl ToReal, w: &Float, wp: &Float, params: &EnsembleParams) -> Result<(AuxQuantities, Float)> {
    let p = w.prec();
    let t = t.to_real(p);
    check_sample(&t, w)?;
    let a_n = params.a_n_mp(p);
    let omt = Float::with_val(p, 1u32 - &t);
    let one_mw = Float::with_val(p, 1u32 - w);
    let x = Float::with_val(p, &a_n * &one_mw) / &omt;
    // x' = A_n [(1 - W) - (1 - t) W'] / (1 - t)^2
    let mut xp = one_mw - Float::with_val(p, &omt * wp);
    xp *= &a_n;
    xp /= Float::with_val(p, omt.square_ref());
    let y = y_from_x(&t, &x, &xp, params)?;
    let r = r_from_xy(&t, &x, &xp, &y, params)?;
    Ok((AuxQuantities { r_big: Float::with_val(p, f64::NAN), r_small: r, x, y }, xp))
}

/// Seed offset. The neglected second-order response perturbs the trajectory
/// by `O(t0^(1 + alpha))` with a large, degree-dependent constant, so the
/// offset shrinks with the working precision.
fn default_seed_t0(params: &EnsembleParams, ctx: &PrecisionCtx) -> f64 {
    let e = -0.75 * ctx.bits() as f64 / (1.0 + params.alpha.max(0.0));
    2f64.powf(e).clamp(1e-60, 1e-4)
}

/// `(W(t0) - t0, W'(t0) - 1)` from the first-order response of `x_n` at `t = 0`.
fn seed_at_zero(t0: &Float, response: &ZeroResponse, params: &EnsembleParams) -> Result<(Float, Float)> {
    let p = t0.prec();
    let (alpha, beta) = (params.alpha, params.beta);
    let count = 2 * params.n + 1;
    let lower = |b: f64| -> Result<Vec<Float>> {
        (0..count as u32).map(|k| log_lower_moment_mp(k, t0, alpha, b).map(|l| l.exp())).collect()
    };
    let dmu = lower(beta)?;
    let dnu = lower(beta - 1.0)?;
    // d/dt of the removed mass: t^(k+alpha) (1-t)^b
    let ln_t = Float::with_val(p, t0.ln_ref());
    let ln_omt = Float::with_val(p, (-t0.clone()).ln_1p());
    let rate = |b: f64| -> Vec<Float> {
        (0..count)
            .map(|k| {
                let mut l = Float::with_val(p, &ln_t * (k as f64 + alpha));
                l += Float::with_val(p, &ln_omt * b);
                l.exp()
            })
            .collect()
    };
    let dx = response.dx(&dmu, &dnu);
    let dxp = response.dx(&rate(beta), &rate(beta - 1.0));
    let a_n = params.a_n_mp(p);
    let omt = Float::with_val(p, 1u32 - t0);
    // W = 1 - (1 - t) x / A_n and W' = (x - (1 - t) x') / A_n, written
    // relative to t and 1 so nothing cancels when the response is tiny
    let gap = Float::with_val(p, &a_n - &response.x0) - &dx;
    let u = Float::with_val(p, &omt * &gap) / &a_n;
    let mut v = -gap;
    v -= Float::with_val(p, &omt * &dxp);
    v /= &a_n;
    Ok((u, v))
}

struct PviSystem {
    params: EnsembleParams,
}

impl crate::ode::System for PviSystem {
    fn eval(&self, t: &Float, y: &[Float]) -> Result<Vec<Float>> {
        let upp = pvi_rhs(t, &y[0], &y[1], &self.params);
        if !upp.is_finite() {
            return Err(Error::PoleProximity { t: t.to_f64(), manifold: "W in {0, 1, t}", distance: 0.0 });
        }
        Ok(vec![y[1].clone(), upp])
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("integrate_w", "empty grid"));
    }
    if !grid.iter().all(|&t| t > 0.0 && t < 1.0) {
        return Err(domain("integrate_w", "grid must lie in (0, 1)"));
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(domain("integrate_w", "grid must be strictly increasing"));
    }
    Ok(())
}

struct RawRun {
    w: Vec<Float>,
    wp: Vec<Float>,
    diag: TrajectoryDiagnostics,
}

fn run_from(
    params: &EnsembleParams,
    grid: &[f64],
    t_start: &Float,
    y0: Vec<Float>,
    tol: f64,
    prec: u32,
) -> Result<RawRun> {
    let system = PviSystem { params: *params };
    let t_scale = t_start.to_f64();
    // state is (W - t, W' - 1); both start small, so the absolute floor
    // follows their initial size
    let floor = y0.iter().map(|v| v.to_f64().abs()).fold(1.0f64, f64::min).max(1e-300);
    let gopts = GbsOptions { rtol: tol, atol: tol * floor * 1e-3, ..Default::default() };
    let mut gbs = Gbs::new(&system, gopts, prec);
    let mut t = t_start.clone();
    let mut y = y0;
    let mut w = Vec::with_capacity(grid.len());
    let mut wp = Vec::with_capacity(grid.len());
    let mut min_dist = f64::INFINITY;
    let h0 = (t_scale * 0.1).max(1e-300);
    for &tg in grid {
        let target = Float::with_val(prec, tg);
        if target > t {
            y = gbs.integrate(&t, &y, &target, h0)?;
            t = target;
        }
        let wt = Float::with_val(prec, &t + &y[0]);
        min_dist = min_dist.min(check_sample(&t, &wt)?);
        w.push(wt);
        wp.push(Float::with_val(prec, &y[1] + 1u32));
    }
    let s = &gbs.stats;
    let diag = TrajectoryDiagnostics {
        steps: s.accepted,
        rejected: s.rejected,
        rhs_evals: s.rhs_evals,
        min_step: s.min_step,
        min_pole_distance: min_dist,
        pole_proximity: min_dist < 1e-6,
        seed_t: t_scale,
        seed_halving_change: None,
    };
    Ok(RawRun { w, wp, diag })
}

/// Per-step tolerance actually used: `opts.tol`, tightened to half the
/// working precision. Forward integration amplifies local errors by many
/// orders of magnitude, so a loose per-step bound alone does not deliver
/// comparable end-to-end accuracy.
fn local_tolerance(opts: &IntegratorOptions, ctx: &PrecisionCtx) -> f64 {
    opts.tol.min(2f64.powf(-(ctx.bits() as f64) / 2.0))
}

/// Extra working bits for integrating near the seed, where the equation's
/// terms are large and cancel: about `(2 alpha + 1) log2(1/t0)`.
fn seed_bits(t0: f64, alpha: f64) -> u32 {
    ((2.0 * alpha.max(0.0) + 1.0) * (-t0.log2()).max(0.0)).ceil() as u32 + 16
}

/// Integrates the Painleve VI equation for `W_n` and samples it on `grid`.
pub fn integrate_w(
    params: &EnsembleParams,
    grid: &[f64],
    seed_mode: SeedMode,
    opts: &IntegratorOptions,
    ctx: &PrecisionCtx,
) -> Result<PainleveTrajectory> {
    validate_grid(grid)?;
    if !(opts.tol > 0.0) {
        return Err(domain("integrate_w", "tolerance must be positive"));
    }
    let step_tol = local_tolerance(opts, ctx);
    let (w, wp, diag) = match seed_mode {
        SeedMode::SeriesAtZero => {
            if !(params.beta > 0.0) {
                return Err(domain("integrate_w", "seeding at t = 0 needs beta > 0"));
            }
            let t0 = opts.seed_t0.unwrap_or_else(|| default_seed_t0(params, ctx));
            if !(t0 > 0.0 && t0 < grid[0]) {
                return Err(domain("integrate_w", format!("seed offset {t0} must lie in (0, {})", grid[0])));
            }
            let prec = ctx.prec() + seed_bits(t0 / 2.0, params.alpha);
            let response = ZeroResponse::new(params, prec)?;
            let start = |t0: f64| -> Result<RawRun> {
                let t0f = Float::with_val(prec, t0);
                let (u0, v0) = seed_at_zero(&t0f, &response, params)?;
                run_from(params, grid, &t0f, vec![u0, v0], step_tol, prec)
            };
            let (mut run, half) = if opts.verify_seed {
                let (a, b) = rayon::join(|| start(t0), || start(t0 / 2.0));
                (a?, Some(b?))
            } else {
                (start(t0)?, None)
            };
            if let Some(half) = half {
                let mut worst = 0.0f64;
                for (a, b) in run.w.iter().zip(&half.w) {
                    let rel = (Float::with_val(prec, a - b) / a).to_f64().abs();
                    worst = worst.max(rel);
                }
                run.diag.seed_halving_change = Some(worst);
                if worst > 10.0 * opts.tol {
                    return Err(Error::SeedInstability { discrepancy: worst, tolerance: 10.0 * opts.tol });
                }
            }
            (run.w, run.wp, run.diag)
        }
        SeedMode::LargeNSeed => {
            let prec = ctx.prec();
            let ts = Float::with_val(prec, grid[0]);
            let (w0, wp0) = wn_series_mp(&ts, params);
            let y0 = vec![w0 - &ts, wp0 - 1u32];
            let run = run_from(params, grid, &ts, y0, step_tol, prec)?;
            (run.w, run.wp, run.diag)
        }
    };
    Ok(PainleveTrajectory { params: *params, grid: grid.to_vec(), w, wp, seed_mode, diagnostics: diag })
}

impl PainleveTrajectory {
    /// `H_n` at every grid point.
    pub fn hn(&self) -> Result<Vec<Float>> {
        self.grid.iter().zip(self.w.iter().zip(&self.wp)).map(|(&t, (w, wp))| hn_from_w(t, w, wp, &self.params)).collect()
    }
}
