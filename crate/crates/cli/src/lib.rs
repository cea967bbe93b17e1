//! Batch driver for the `hardedge` library: grid sweeps over each numerical
//! route, cross-route validation suites and CSV/JSON reports.

pub mod commands;
pub mod config;
pub mod report;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use hardedge::asymptotics::{hard_edge_constant, logdet_series};
use hardedge::fredholm::log_fredholm_det;
use hardedge::{Error, PrecisionCtx};
use rayon::prelude::*;
use rug::Float;
use thiserror::Error as ThisError;

pub use config::{Command, ConfigError, Format, Grid, RunConfig, Spacing, Suite};
pub use report::{Cell, Report, ReportRow};

#[derive(Debug, ThisError)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Io(_) => 1,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    /// 0 when every row passed, 1 otherwise.
    pub exit_code: i32,
}

/// Executes `config` and writes its report to `config.out`, or to stdout.
pub fn run(config: &RunConfig) -> Result<Outcome, RunError> {
    let report = commands::execute(config)?;
    let generated = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    match &config.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(&mut w, generated)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            report.write(stdout.lock(), generated)?;
        }
    }
    let exit_code = if report.passed() { 0 } else { 1 };
    Ok(Outcome { report, exit_code })
}

#[derive(Debug, Clone)]
pub struct ConstantEstimate {
    /// Mean over the grid of `log det` minus every non-constant term of the expansion.
    pub c_hat: Float,
    /// `log G(alpha + 1) - (alpha / 2) log(2 pi)`.
    pub c_exact: Float,
    /// `|c_hat - c_exact|`.
    pub diff: f64,
}

/// Measures the constant term of the large-gap expansion from Fredholm
/// determinants on `points` log-spaced gaps in `[s_lo, s_hi]`.
pub fn constant_extract(
    alpha: f64,
    s_lo: f64,
    s_hi: f64,
    points: usize,
    m: usize,
    ctx: &PrecisionCtx,
) -> hardedge::Result<ConstantEstimate> {
    if !(s_lo >= 100.0 && s_hi >= s_lo && points >= 1) {
        return Err(Error::Domain { op: "constant_extract", msg: format!("need 100 <= s_lo <= s_hi and points >= 1, got [{s_lo}, {s_hi}] x {points}") });
    }
    let grid = if points == 1 { Grid::single(s_lo) } else { Grid { lo: s_lo, hi: s_hi, count: points, spacing: Spacing::Log } };
    let c_exact = hard_edge_constant(alpha, ctx)?;
    let p = ctx.prec();
    let samples = grid
        .points()
        .par_iter()
        .map(|&s| {
            let det = log_fredholm_det(s, alpha, m, ctx)?;
            let series = logdet_series(s, alpha, ctx)?;
            // the non-constant terms are the series value with its constant removed
            let varying = Float::with_val(p, series.value) - &c_exact;
            Ok(det - varying)
        })
        .collect::<hardedge::Result<Vec<Float>>>()?;
    let mut c_hat = Float::new(p);
    for v in &samples {
        c_hat += v;
    }
    c_hat /= samples.len() as u32;
    let diff = Float::with_val(p, &c_hat - &c_exact).abs().to_f64();
    Ok(ConstantEstimate { c_hat, c_exact, diff })
}

/// `log det(I - K)` on `(0, b^2)` summed over `alpha = 1/2` and `alpha = -1/2`.
pub fn sym_gap_product(b: f64, m: usize, ctx: &PrecisionCtx) -> hardedge::Result<Float> {
    let s = b * b;
    let (plus, minus) = rayon::join(|| log_fredholm_det(s, 0.5, m, ctx), || log_fredholm_det(s, -0.5, m, ctx));
    Ok(plus? + minus?)
}
