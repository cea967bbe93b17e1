use hardedge::asymptotics::{
    hard_edge_constant, hn_series, logdet_series, logp_large_n, logp_near_one, sym_gap_series, wn_series, ExpansionResult,
};
use hardedge::finite_n::{aux_exact, hn_exact, log_prob_smallest, x_derivative, EnsembleParams};
use hardedge::fredholm::{default_points, log_fredholm_det, log_fredholm_det_checked};
use hardedge::mc::survival_estimate;
use hardedge::painleve::{h_from_xy, h_from_yr, hn_from_w, integrate_w, r_from_xy, y_from_x, IntegratorOptions, SeedMode};
use hardedge::{Error, PrecisionCtx};
use rayon::prelude::*;
use rug::Float;

use crate::config::{Command, ConfigError, Grid, RunConfig, Spacing, Suite};
use crate::report::{Report, ReportRow};
use crate::{constant_extract, sym_gap_product};

/// Relative `H_n` agreement required between the Painleve and Hankel routes.
pub const PAINLEVE_TOLERANCE: f64 = 1e-6;
/// Relative residual allowed in the auxiliary-quantity identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Change allowed when the quadrature size doubles.
pub const DOUBLING_TOLERANCE: f64 = 1e-10;
/// Agreement required of extracted constants and the symmetric product.
pub const CONSTANT_TOLERANCE: f64 = 1e-3;
/// Absolute error allowed in the alpha = 0 closed form.
pub const ALPHA_ZERO_TOLERANCE: f64 = 1e-30;
/// Standard errors allowed between a Monte Carlo estimate and the exact value.
pub const MC_SIGMAS: f64 = 4.0;

const DEFAULT_T_GRID: [f64; 10] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

fn ensemble(cfg: &RunConfig) -> Result<EnsembleParams, ConfigError> {
    let (a, b, n) = (cfg.alpha.unwrap_or_default(), cfg.beta.unwrap_or_default(), cfg.n.unwrap_or(1));
    EnsembleParams::new(a, b, n).map_err(|e| ConfigError::Invalid(e.to_string()))
}

fn ctx_or(cfg: &RunConfig, default: PrecisionCtx) -> Result<PrecisionCtx, ConfigError> {
    match cfg.bits {
        Some(b) => PrecisionCtx::new(b).map_err(|e| ConfigError::Invalid(e.to_string())),
        None => Ok(default),
    }
}

fn fixed(bits: u32) -> PrecisionCtx {
    PrecisionCtx::new(bits).expect("bits above minimum")
}

fn t_points(cfg: &RunConfig) -> Vec<f64> {
    cfg.t.map(|g| g.points()).unwrap_or_else(|| DEFAULT_T_GRID.to_vec())
}

fn expansion(row: &mut ReportRow, name: &str, e: hardedge::Result<ExpansionResult>) {
    match e {
        Ok(e) => {
            row.float(name, e.value).float(&format!("budget_{name}"), e.budget);
        }
        Err(err) => {
            row.route::<Error>(name, Err(err)).missing(&format!("budget_{name}"));
        }
    }
}

/// Runs the configured command; configuration problems are returned, route
/// failures are recorded in the rows.
pub fn execute(cfg: &RunConfig) -> Result<Report, ConfigError> {
    cfg.validate()?;
    let (ctx, rows) = match cfg.command {
        Command::Finite => finite(cfg)?,
        Command::Painleve => painleve(cfg)?,
        Command::Fredholm => fredholm(cfg)?,
        Command::Asymptotic => asymptotic(cfg)?,
        Command::Mc => mc(cfg)?,
        Command::Constant => constant(cfg)?,
        Command::Validate => match cfg.suite.expect("validated") {
            Suite::PainleveVsHankel => painleve(cfg)?,
            Suite::Identities => identities(cfg)?,
            Suite::AlphaZero => alpha_zero(cfg)?,
            Suite::HardEdge => hard_edge(cfg)?,
            Suite::SymGap => sym_gap(cfg)?,
        },
    };
    Ok(Report { config: cfg.clone(), digits: ctx.print_digits(), rows })
}

type Rows = (PrecisionCtx, Vec<ReportRow>);

fn finite(cfg: &RunConfig) -> Result<Rows, ConfigError> {
    let pr = ensemble(cfg)?;
    let ctx = ctx_or(cfg, PrecisionCtx::for_degree(pr.n))?;
    let rows = t_points(cfg)
        .par_iter()
        .map(|&t| {
            let mut r = ReportRow::new();
            let lp = log_prob_smallest(t, &pr, &ctx);
            let p = lp.as_ref().map(|v| Float::with_val(v.prec(), v.exp_ref())).map_err(Clone::clone);
            r.input("t", t).route("log_p", lp).route("p", p).route("hn", hn_exact(t, &pr, &ctx));
            r
        })
        .collect();
    Ok((ctx, rows))
}

fn painleve(cfg: &RunConfig) -> Result<Rows, ConfigError> {
    let pr = ensemble(cfg)?;
    let ctx = ctx_or(cfg, PrecisionCtx::for_degree(pr.n))?;
    let grid = t_points(cfg);
    let mut opts = IntegratorOptions::default();
    if let Some(tol) = cfg.ode_tol {
        opts.tol = tol;
    }
    let reference_ctx = PrecisionCtx::for_degree(pr.n);
    let (trajectory, reference) = rayon::join(
        || integrate_w(&pr, &grid, SeedMode::SeriesAtZero, &opts, &ctx),
        || grid.par_iter().map(|&t| hn_exact(t, &pr, &reference_ctx)).collect::<Vec<_>>(),
    );
    let hn = trajectory.as_ref().map_err(Clone::clone).and_then(|tr| tr.hn());
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut r = ReportRow::new();
            r.input("t", t);
            match (&trajectory, &hn) {
                (Ok(tr), Ok(h)) => {
                    r.value("w", tr.w[i].clone()).value("wp", tr.wp[i].clone()).value("hn_painleve", h[i].clone());
                }
                (Ok(tr), Err(e)) => {
                    r.value("w", tr.w[i].clone()).value("wp", tr.wp[i].clone()).route::<Error>("hn_painleve", Err(e.clone()));
                }
                (Err(e), _) => {
                    r.missing("w").missing("wp").route::<Error>("hn_painleve", Err(e.clone()));
                }
            }
            r.route("hn_hankel", reference[i].clone()).diff("d_hn", "hn_painleve", "hn_hankel");
            let ok = r.relative("hn_painleve", "hn_hankel", 1e-300).map(|d| d <= PAINLEVE_TOLERANCE);
            r.check("ok_hn", ok);
            let clear = trajectory.as_ref().ok().map(|tr| !tr.diagnostics.pole_proximity);
            r.check("clear_of_poles", clear);
            r
        })
        .collect();
    Ok((ctx, rows))
}

fn fredholm(cfg: &RunConfig) -> Result<Rows, ConfigError> {
    let alpha = cfg.alpha.expect("validated");
    let ctx = ctx_or(cfg, fixed(128))?;
    let rows = cfg
        .s
        .expect("validated")
        .points()
        .par_iter()
        .map(|&s| {
            let m = cfg.m.unwrap_or_else(|| default_points(s));
            let mut r = ReportRow::new();
            r.input("s", s).int("m", m as u64);
            if cfg.check_doubling {
                match log_fredholm_det_checked(s, alpha, m, &ctx) {
                    Ok(c) => {
                        r.value("fredholm", c.value).value("fredholm_2m", c.doubled).diff("d_doubling", "fredholm", "fredholm_2m");
                    }
                    Err(e) => {
                        r.route::<Error>("fredholm", Err(e)).missing("fredholm_2m").missing("d_doubling");
                    }
                }
                let ok = r.abs("d_doubling").map(|d| d <= DOUBLING_TOLERANCE);
                r.check("ok_doubling", ok);
            } else {
                r.route("fredholm", log_fredholm_det(s, alpha, m, &ctx));
            }
            expansion(&mut r, "series", logdet_series(s, alpha, &ctx));
            r.diff("d_series", "fredholm", "series");
            r
        })
        .collect();
    Ok((ctx, rows))
}

fn asymptotic(cfg: &RunConfig) -> Result<Rows, ConfigError> {
    let ctx = ctx_or(cfg, fixed(128))?;
    let rows = if let Some(t) = cfg.t {
        let pr = ensemble(cfg)?;
        t.points()
            .iter()
            .map(|&t| {
                let mut r = ReportRow::new();
                r.input("t", t);
                expansion(&mut r, "logp_near_one", logp_near_one(t, &pr, &ctx));
                expansion(&mut r, "logp_large_n", logp_large_n(t, &pr, &ctx));
                expansion(&mut r, "hn", hn_series(t, &pr));
                expansion(&mut r, "wn", wn_series(t, &pr));
                r
            })
            .collect()
    } else if let Some(s) = cfg.s {
        let alpha = cfg.alpha.expect("validated");
        s.points()
            .iter()
            .map(|&s| {
                let mut r = ReportRow::new();
                r.input("s", s);
                expansion(&mut r, "logdet", logdet_series(s, alpha, &ctx));
                r
            })
            .collect()
    } else {
        cfg.b
            .expect("validated")
            .points()
            .iter()
            .map(|&b| {
                let mut r = ReportRow::new();
                r.input("b", b);
                expansion(&mut r, "sym_gap", sym_gap_series(b, &ctx));
                r
            })
            .collect()
    };
    Ok((ctx, rows))
}

fn mc(cfg: &RunConfig) -> Result<Rows, ConfigError> {
    let pr = ensemble(cfg)?;
    let ctx = ctx_or(cfg, PrecisionCtx::for_degree(pr.n))?;
    let samples = cfg.samples.unwrap_or(100_000);
    let seed = cfg.seed.unwrap_or(0);
    let (a, b) = (pr.alpha as u32, pr.beta as u32);
    let rows = t_points(cfg)
        .iter()
        .map(|&t| {
            let mut r = ReportRow::new();
            r.input("t", t).int("samples", samples as u64);
            match survival_estimate(samples, t, pr.n, a, b, seed) {
                Ok(e) => {
                    r.float("p_hat", e.p_hat).float("se", e.se);
                    let exact = log_prob_smallest(t, &pr, &ctx).map(|v| v.exp());
                    r.route("p_exact", exact).diff("d_mc", "p_hat", "p_exact");
                    let ok = r.abs("d_mc").map(|d| d <= MC_SIGMAS * e.se);
                    r.check("ok_mc", ok).int("redraws", e.redraws as u64);
                }
                Err(e) => {
                    r.route::<Error>("p_hat", Err(e)).missing("se").missing("p_exact").missing("d_mc");
                    r.check("ok_mc", None).int("redraws", 0);
                }
            }
            r
        })
        .collect();
    Ok((ctx, rows))
}

fn constant(cfg: &RunConfig) -> Result<Rows, ConfigError> {
    let alpha = cfg.alpha.expect("validated");
    let grid = cfg.s.expect("validated");
    let ctx = ctx_or(cfg, fixed(128))?;
    let m = cfg.m.unwrap_or_else(|| default_points(grid.hi));
    let mut r = ReportRow::new();
    r.input("alpha", alpha).input("s_lo", grid.lo).input("s_hi", grid.hi).int("points", grid.count as u64).int("m", m as u64);
    match constant_extract(alpha, grid.lo, grid.hi, grid.count, m, &ctx) {
        Ok(c) => {
            r.value("c_hat", c.c_hat).value("c_exact", c.c_exact);
        }
        Err(e) => {
            r.route::<Error>("c_hat", Err(e)).route("c_exact", hard_edge_constant(alpha, &ctx));
        }
    }
    r.diff("d_constant", "c_hat", "c_exact");
    let ok = r.abs("d_constant").map(|d| d <= CONSTANT_TOLERANCE);
    r.check("ok_constant", ok);
    if cfg.check_doubling {
        // a fixed rule is least accurate at the largest s of the grid
        match log_fredholm_det_checked(grid.hi, alpha, m, &ctx) {
            Ok(c) => {
                r.float("doubling_change", c.change).check("ok_doubling", Some(c.change <= DOUBLING_TOLERANCE));
            }
            Err(e) => {
                r.route::<Error>("doubling_change", Err(e)).check("ok_doubling", None);
            }
        }
    }
    Ok((ctx, vec![r]))
}

fn identities(cfg: &RunConfig) -> Result<Rows, ConfigError> {
    let pr = ensemble(cfg)?;
    let ctx = ctx_or(cfg, PrecisionCtx::for_degree(pr.n))?;
    let p = ctx.prec();
    let rows = t_points(cfg)
        .par_iter()
        .map(|&t| {
            let mut r = ReportRow::new();
            r.input("t", t);
            let inputs = aux_exact(t, &pr, &ctx).and_then(|ax| Ok((x_derivative(t, 1e-5, &pr, &ctx)?, ax)));
            let (xp, ax) = match inputs {
                Ok(v) => v,
                Err(e) => {
                    r.error(format!("inputs: {e}"));
                    return r;
                }
            };
            let a_n = pr.a_n_mp(p);
            let omt = 1u32 - Float::with_val(p, t);
            let w = 1u32 - Float::with_val(p, &omt * &ax.x) / &a_n;
            let wp = (Float::with_val(p, &ax.x - Float::with_val(p, &omt * &xp))) / &a_n;
            r.route("y_identity", y_from_x(t, &ax.x, &xp, &pr)).value("y_exact", ax.y.clone()).diff("d_y", "y_identity", "y_exact");
            r.route("r_identity", r_from_xy(t, &ax.x, &xp, &ax.y, &pr))
                .value("r_exact", ax.r_small.clone())
                .diff("d_r", "r_identity", "r_exact");
            r.route("hn_exact", hn_exact(t, &pr, &ctx));
            r.value("hn_xy", h_from_xy(t, &ax.x, &xp, &ax.y, &pr)).diff("d_hn_xy", "hn_xy", "hn_exact");
            r.value("hn_yr", h_from_yr(t, &ax.y, &ax.r_small, &pr)).diff("d_hn_yr", "hn_yr", "hn_exact");
            r.route("hn_w", hn_from_w(t, &w, &wp, &pr)).diff("d_hn_w", "hn_w", "hn_exact");
            for (name, a, b) in [
                ("ok_y", "y_identity", "y_exact"),
                ("ok_r", "r_identity", "r_exact"),
                ("ok_hn_xy", "hn_xy", "hn_exact"),
                ("ok_hn_yr", "hn_yr", "hn_exact"),
                ("ok_hn_w", "hn_w", "hn_exact"),
            ] {
                let ok = r.relative(a, b, 1.0).map(|d| d <= IDENTITY_TOLERANCE);
                r.check(name, ok);
            }
            r
        })
        .collect();
    Ok((ctx, rows))
}

fn alpha_zero(cfg: &RunConfig) -> Result<Rows, ConfigError> {
    let ctx = ctx_or(cfg, fixed(256))?;
    let p = ctx.prec();
    let n_max = cfg.n.unwrap_or(10);
    let betas = cfg.beta.map(|b| vec![b]).unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let ts = cfg.t.map(|g| g.points()).unwrap_or_else(|| Grid { lo: 0.1, hi: 0.9, count: 9, spacing: Spacing::Linear }.points());
    let mut cells: Vec<(usize, f64, f64)> = Vec::new();
    for n in 1..=n_max {
        for &b in &betas {
            cells.extend(ts.iter().map(|&t| (n, b, t)));
        }
    }
    let rows = cells
        .par_iter()
        .map(|&(n, b, t)| {
            let mut r = ReportRow::new();
            r.int("n", n as u64).input("beta", b).input("t", t);
            match EnsembleParams::new(0.0, b, n) {
                Ok(pr) => {
                    let omt = 1u32 - Float::with_val(p, t);
                    let closed = omt.ln() * (n as f64 * (n as f64 + b));
                    r.route("log_p", log_prob_smallest(t, &pr, &ctx)).value("closed_form", closed).diff("d_log_p", "log_p", "closed_form");
                }
                Err(e) => {
                    r.route::<Error>("log_p", Err(e)).missing("closed_form").missing("d_log_p");
                }
            }
            let ok = r.abs("d_log_p").map(|d| d <= ALPHA_ZERO_TOLERANCE);
            r.check("ok", ok);
            r
        })
        .collect();
    Ok((ctx, rows))
}

fn hard_edge(cfg: &RunConfig) -> Result<Rows, ConfigError> {
    let ctx = ctx_or(cfg, fixed(1024))?;
    let alpha = cfg.alpha.unwrap_or(1.0);
    let beta = cfg.beta.unwrap_or(2.0);
    let s = cfg.s.map(|g| g.lo).unwrap_or(25.0);
    let n_max = cfg.n.unwrap_or(32);
    let m = cfg.m.unwrap_or(40);
    let ns: Vec<usize> = std::iter::successors(Some(8usize), |n| Some(n * 2)).take_while(|n| *n <= n_max.max(8)).collect();
    let fred_ctx = fixed(128);
    let (fred, finite) = rayon::join(
        || log_fredholm_det(s, alpha, m, &fred_ctx),
        || {
            ns.par_iter()
                .map(|&n| {
                    let t = s / (4.0 * (n * n) as f64);
                    let pr = EnsembleParams::new(alpha, beta, n)?;
                    log_prob_smallest(t, &pr, &ctx)
                })
                .collect::<Vec<_>>()
        },
    );
    let mut last: Option<f64> = None;
    let rows = ns
        .iter()
        .zip(finite)
        .map(|(&n, lp)| {
            let mut r = ReportRow::new();
            r.int("n", n as u64).input("t", s / (4.0 * (n * n) as f64));
            r.route("finite", lp).route("fredholm", fred.clone()).diff("d_hard_edge", "finite", "fredholm");
            let d = r.abs("d_hard_edge");
            let ok = d.map(|d| last.is_none_or(|prev| d < prev));
            r.check("ok_decreasing", ok);
            last = d;
            r
        })
        .collect();
    Ok((ctx, rows))
}

fn sym_gap(cfg: &RunConfig) -> Result<Rows, ConfigError> {
    let ctx = ctx_or(cfg, fixed(128))?;
    let bs = cfg.b.map(|g| g.points()).unwrap_or_else(|| vec![20.0, 25.0, 30.0]);
    let rows = bs
        .par_iter()
        .map(|&b| {
            let m = cfg.m.unwrap_or_else(|| default_points(b * b));
            let mut r = ReportRow::new();
            r.input("b", b).int("m", m as u64);
            r.route("product", sym_gap_product(b, m, &ctx));
            expansion(&mut r, "series", sym_gap_series(b, &ctx));
            r.diff("d_sym_gap", "product", "series");
            let ok = r.abs("d_sym_gap").map(|d| d <= CONSTANT_TOLERANCE);
            r.check("ok_sym_gap", ok);
            r
        })
        .collect();
    Ok((ctx, rows))
}
