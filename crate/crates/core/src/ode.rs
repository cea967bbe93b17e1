//! Gragg-Bulirsch-Stoer extrapolation for first-order systems in `rug::Float`.
//!
//! Every coefficient of the scheme is rational, so the method keeps its
//! order at any working precision. Step size and extrapolation depth adapt
//! to a mixed absolute/relative tolerance on the estimated local error.

use rug::{Assign, Float};

use crate::error::{Error, Result};

/// Right-hand side `y' = f(t, y)`. Returning an error rejects the trial step;
/// it is propagated once the step size cannot shrink further.
pub trait System {
    fn eval(&self, t: &Float, y: &[Float]) -> Result<Vec<Float>>;
}

impl<F> System for F
where
    F: Fn(&Float, &[Float]) -> Result<Vec<Float>>,
{
    fn eval(&self, t: &Float, y: &[Float]) -> Result<Vec<Float>> {
        self(t, y)
    }
}

#[derive(Debug, Clone)]
pub struct GbsOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Deepest extrapolation column (order `2 * max_columns`).
    pub max_columns: usize,
    pub max_steps: usize,
    /// Smallest admissible step relative to `|t|`.
    pub min_step: f64,
}

impl Default for GbsOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-30, max_columns: 16, max_steps: 200_000, min_step: 1e-40 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub min_step: f64,
}

pub struct Gbs<'a, S: System> {
    system: &'a S,
    opts: GbsOptions,
    prec: u32,
    /// Current step proposal and preferred column.
    h: Option<Float>,
    k_target: usize,
    pub stats: StepStats,
}

fn seq(j: usize) -> u32 {
    2 * (j as u32 + 1)
}

impl<'a, S: System> Gbs<'a, S> {
    pub fn new(system: &'a S, opts: GbsOptions, prec: u32) -> Self {
        let k_target = (opts.max_columns / 2).max(3);
        Self { system, opts, prec, h: None, k_target, stats: StepStats { min_step: f64::INFINITY, ..Default::default() } }
    }

    /// Modified midpoint rule with `n` substeps over `[t, t + big_h]`.
    fn midpoint(&mut self, t: &Float, y: &[Float], f0: &[Float], big_h: &Float, n: u32) -> Result<Vec<Float>> {
        let p = self.prec;
        let h = Float::with_val(p, big_h / n);
        let h2 = Float::with_val(p, &h * 2u32);
        let mut prev: Vec<Float> = y.to_vec();
        let mut cur: Vec<Float> = y.iter().zip(f0).map(|(yi, fi)| Float::with_val(p, yi + Float::with_val(p, fi * &h))).collect();
        let mut tm = Float::with_val(p, t + &h);
        for _ in 1..n {
            let f = self.system.eval(&tm, &cur)?;
            self.stats.rhs_evals += 1;
            let next: Vec<Float> = prev.iter().zip(&f).map(|(a, fi)| Float::with_val(p, a + Float::with_val(p, fi * &h2))).collect();
            prev = std::mem::replace(&mut cur, next);
            tm += &h;
        }
        let f = self.system.eval(&tm, &cur)?;
        self.stats.rhs_evals += 1;
        Ok(cur
            .iter()
            .zip(prev.iter().zip(&f))
            .map(|(zn, (zm, fi))| {
                let mut v = Float::with_val(p, zn + zm);
                v += Float::with_val(p, fi * &h);
                v / 2u32
            })
            .collect())
    }

    fn error_norm(&self, a: &[Float], b: &[Float], y: &[Float]) -> f64 {
        let p = self.prec;
        let mut worst = 0.0f64;
        let mut d = Float::new(p);
        for ((ai, bi), yi) in a.iter().zip(b).zip(y) {
            d.assign(ai - bi);
            let scale = self.opts.atol + self.opts.rtol * yi.to_f64().abs().max(ai.to_f64().abs());
            let e = d.to_f64().abs() / scale;
            worst = worst.max(if e.is_nan() { f64::INFINITY } else { e });
        }
        worst
    }

    /// Attempts one step of size `big_h`. On success returns the new state
    /// and the proposal for the next step; on rejection stores a smaller
    /// proposal and returns `None`.
    fn try_step(&mut self, t: &Float, y: &[Float], big_h: &Float) -> Result<Option<(Vec<Float>, Float)>> {
        let p = self.prec;
        let f0 = self.system.eval(t, y)?;
        self.stats.rhs_evals += 1;
        let kmax = self.opts.max_columns;
        let k_last = (self.k_target + 1).min(kmax);
        let first_accept = self.k_target.saturating_sub(2).max(2);
        let mut prev_row: Vec<Vec<Float>> = Vec::new();
        for j in 0..k_last {
            let nj = seq(j);
            let mut row = vec![self.midpoint(t, y, &f0, big_h, nj)?];
            for k in 1..=j {
                // (n_j / n_{j-k})^2 - 1, formed exactly
                let nk = seq(j - k);
                let den = Float::with_val(p, nj * nj - nk * nk) / (nk * nk);
                let next: Vec<Float> = row[k - 1]
                    .iter()
                    .zip(&prev_row[k - 1])
                    .map(|(c, q)| Float::with_val(p, c + Float::with_val(p, c - q) / &den))
                    .collect();
                row.push(next);
            }
            if j >= 2 {
                let err = self.error_norm(&row[j], &row[j - 1], y);
                let fac = if err == 0.0 { 4.0 } else { (0.94 * (0.65 / err).powf(1.0 / (2 * j + 1) as f64)).clamp(0.05, 4.0) };
                if err <= 1.0 && j >= first_accept {
                    // converging before the target column suggests a lower order suffices
                    self.k_target = if j + 1 < self.k_target { (j + 1).max(3) } else { (j + 2).min(kmax) };
                    let hnew = Float::with_val(p, big_h * fac);
                    return Ok(Some((row.swap_remove(j), hnew)));
                }
                if j + 1 == k_last {
                    self.h = Some(Float::with_val(p, big_h * fac.min(0.7)));
                    self.k_target = (self.k_target + 1).min(kmax);
                    return Ok(None);
                }
            }
            prev_row = row;
        }
        self.h = Some(Float::with_val(p, big_h / 2u32));
        Ok(None)
    }

    /// Integrates from `t0` to `t1 > t0` starting at `y0`, with an initial
    /// step guess `h0`. Returns `y(t1)`.
    pub fn integrate(&mut self, t0: &Float, y0: &[Float], t1: &Float, h0: f64) -> Result<Vec<Float>> {
        let p = self.prec;
        let mut t = Float::with_val(p, t0);
        let mut y = y0.to_vec();
        if self.h.is_none() {
            self.h = Some(Float::with_val(p, h0));
        }
        let mut steps = 0usize;
        while t < *t1 {
            steps += 1;
            if steps > self.opts.max_steps {
                return Err(Error::NoConvergence { what: "extrapolation integrator", iterations: steps });
            }
            let remaining = Float::with_val(p, t1 - &t);
            let mut h = self.h.clone().expect("step initialised");
            let last = h >= remaining;
            if last {
                h = remaining.clone();
            }
            let hmin = self.opts.min_step * t.to_f64().abs().max(f64::MIN_POSITIVE);
            match self.try_step(&t, &y, &h) {
                Ok(Some((ynew, hnext))) => {
                    self.stats.accepted += 1;
                    self.stats.min_step = self.stats.min_step.min(h.to_f64());
                    y = ynew;
                    if last {
                        t.assign(t1);
                        // keep the proposal for the next interval, unless the
                        // clipped step made it artificially small
                        if hnext > *self.h.as_ref().unwrap() {
                            self.h = Some(hnext);
                        }
                    } else {
                        t += &h;
                        self.h = Some(hnext);
                    }
                }
                Ok(None) => {
                    self.stats.rejected += 1;
                    if self.h.as_ref().unwrap().to_f64() < hmin {
                        return Err(Error::StepUnderflow { t: t.to_f64(), step: h.to_f64() });
                    }
                }
                Err(e) => {
                    self.stats.rejected += 1;
                    let smaller = Float::with_val(p, &h / 4u32);
                    if smaller.to_f64() < hmin {
                        return Err(e);
                    }
                    self.h = Some(smaller);
                }
            }
        }
        Ok(y)
    }
}
