use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use hardedge_cli::{run, Command, Format, Grid, RunConfig, Suite};

const GRID_HELP: &str = "Grids are written lo:hi:count or lo:hi:count:log (log spacing), or as a single value.\n\
Exit status: 0 when every row passes, 1 on a numerical failure, 2 on a usage error.";

#[derive(Parser)]
#[command(name = "hardedge", version, about = "Gap probabilities of the Jacobi unitary ensemble by independent routes", after_help = GRID_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// log P(t) and H_n(t) from Hankel determinants of the truncated weight.
    Finite(Flags),
    /// H_n(t) from the Painleve VI trajectory, checked against the Hankel route.
    Painleve(Flags),
    /// log det(I - K_Bessel) on (0, s) by Nystrom quadrature.
    Fredholm(Flags),
    /// Truncated asymptotic expansions with their error budgets.
    Asymptotic(Flags),
    /// Monte Carlo survival estimates against the exact finite-n value.
    Mc(Flags),
    /// Constant term of the large-gap expansion measured from Fredholm determinants.
    Constant(Flags),
    /// Cross-route validation suites.
    Validate(Flags),
}

#[derive(Args)]
#[command(after_help = GRID_HELP)]
struct Flags {
    /// Exponent of t in the weight, > -1.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Exponent of (1 - t) in the weight, > -1.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Matrix size.
    #[arg(long)]
    n: Option<usize>,
    /// t grid in (0, 1).
    #[arg(long)]
    t: Option<Grid>,
    /// Gap length grid.
    #[arg(long)]
    s: Option<Grid>,
    /// Symmetric-gap grid.
    #[arg(long)]
    b: Option<Grid>,
    /// Working precision in bits (default depends on the route).
    #[arg(long)]
    bits: Option<u32>,
    /// Quadrature points.
    #[arg(long)]
    m: Option<usize>,
    /// Local error tolerance of the ODE integrator.
    #[arg(long)]
    ode_tol: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Repeat with twice the quadrature points and report the change.
    #[arg(long)]
    check_doubling: bool,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Flags {
    fn into_config(self, command: Command) -> RunConfig {
        RunConfig {
            command,
            suite: self.suite,
            alpha: self.alpha,
            beta: self.beta,
            n: self.n,
            t: self.t,
            s: self.s,
            b: self.b,
            bits: self.bits,
            m: self.m,
            ode_tol: self.ode_tol,
            samples: self.samples,
            seed: self.seed,
            check_doubling: self.check_doubling,
            format: self.format,
            out: self.out,
        }
    }
}

fn config(cli: Cli) -> RunConfig {
    match cli.command {
        Cmd::Finite(f) => f.into_config(Command::Finite),
        Cmd::Painleve(f) => f.into_config(Command::Painleve),
        Cmd::Fredholm(f) => f.into_config(Command::Fredholm),
        Cmd::Asymptotic(f) => f.into_config(Command::Asymptotic),
        Cmd::Mc(f) => f.into_config(Command::Mc),
        Cmd::Constant(f) => f.into_config(Command::Constant),
        Cmd::Validate(f) => f.into_config(Command::Validate),
    }
}

fn main() -> Result<ExitCode> {
    let cfg = config(Cli::parse());
    match run(&cfg) {
        Ok(outcome) => {
            if outcome.exit_code != 0 {
                let failed = outcome.report.rows.iter().filter(|r| !r.passed()).count();
                eprintln!("hardedge: {failed} of {} rows failed", outcome.report.rows.len());
            }
            Ok(ExitCode::from(outcome.exit_code as u8))
        }
        Err(e) => {
            eprintln!("hardedge: {e}");
            Ok(ExitCode::from(e.exit_code() as u8))
        }
    }
}
