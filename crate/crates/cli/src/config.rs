use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid grid '{0}': {1}")]
    Grid(String, &'static str),
    #[error("{command} requires --{flag}")]
    Missing { command: Command, flag: &'static str },
    #[error("--{flag} does not apply to {command}")]
    Unused { command: Command, flag: &'static str },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Evaluation points `lo:hi:count[:log]`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn single(v: f64) -> Self {
        Self { lo: v, hi: v, count: 1, spacing: Spacing::Linear }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k == 0 {
                    return self.lo;
                }
                if k == self.count - 1 {
                    return self.hi;
                }
                let f = k as f64 / last;
                let v = match self.spacing {
                    Spacing::Linear => self.lo + (self.hi - self.lo) * f,
                    Spacing::Log => (self.lo.ln() + (self.hi.ln() - self.lo.ln()) * f).exp(),
                };
                // 15 significant digits so that 0.1:0.9:9 yields 0.3, not 0.30000000000000004
                format!("{v:.14e}").parse().unwrap_or(v)
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let bad = |why| ConfigError::Grid(s.to_string(), why);
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(bad("not a number"));
        let grid = match parts.as_slice() {
            [v] => Grid::single(num(v)?),
            [lo, hi, count] | [lo, hi, count, _] => {
                let spacing = match parts.get(3).map(|p| p.trim()) {
                    None | Some("lin") | Some("linear") => Spacing::Linear,
                    Some("log") => Spacing::Log,
                    Some(_) => return Err(bad("spacing must be 'log' or 'linear'")),
                };
                let count: usize = count.trim().parse().map_err(|_| bad("count must be a positive integer"))?;
                Grid { lo: num(lo)?, hi: num(hi)?, count, spacing }
            }
            _ => return Err(bad("expected lo:hi:count[:log] or a single value")),
        };
        if grid.count == 0 {
            return Err(bad("count must be at least 1"));
        }
        if grid.count > 1 && !(grid.lo < grid.hi) {
            return Err(bad("lo must be below hi"));
        }
        if grid.spacing == Spacing::Log && !(grid.lo > 0.0) {
            return Err(bad("log spacing needs lo > 0"));
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.count == 1 {
            return write!(f, "{}", self.lo);
        }
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)?;
        if self.spacing == Spacing::Log {
            write!(f, ":log")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Finite,
    Painleve,
    Fredholm,
    Asymptotic,
    Mc,
    Constant,
    Validate,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Finite => "finite",
            Command::Painleve => "painleve",
            Command::Fredholm => "fredholm",
            Command::Asymptotic => "asymptotic",
            Command::Mc => "mc",
            Command::Constant => "constant",
            Command::Validate => "validate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// H_n from the Painleve VI trajectory against the Hankel route.
    PainleveVsHankel,
    /// Algebraic identities between the auxiliary quantities.
    Identities,
    /// alpha = 0 closed form of the gap probability.
    AlphaZero,
    /// Finite-n gap probability converging to the Fredholm determinant.
    HardEdge,
    /// Product of half-integer determinants against the symmetric expansion.
    SymGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a run depends on; serialised into the report header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub suite: Option<Suite>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub n: Option<usize>,
    pub t: Option<Grid>,
    pub s: Option<Grid>,
    pub b: Option<Grid>,
    pub bits: Option<u32>,
    pub m: Option<usize>,
    pub ode_tol: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub check_doubling: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            suite: None,
            alpha: None,
            beta: None,
            n: None,
            t: None,
            s: None,
            b: None,
            bits: None,
            m: None,
            ode_tol: None,
            samples: None,
            seed: None,
            check_doubling: false,
            format: Format::Csv,
            out: None,
        }
    }

    /// Canonical single-line JSON used in report headers.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    /// Checks that the flags present are exactly those the command uses.
    pub fn validate(&self) -> Result<(), ConfigError> {
        use Command::*;
        let c = self.command;
        let set: [(&'static str, bool); 12] = [
            ("suite", self.suite.is_some()),
            ("alpha", self.alpha.is_some()),
            ("beta", self.beta.is_some()),
            ("n", self.n.is_some()),
            ("t", self.t.is_some()),
            ("s", self.s.is_some()),
            ("b", self.b.is_some()),
            ("m", self.m.is_some()),
            ("ode-tol", self.ode_tol.is_some()),
            ("samples", self.samples.is_some()),
            ("seed", self.seed.is_some()),
            ("check-doubling", self.check_doubling),
        ];
        let (required, optional): (&[&str], &[&str]) = match c {
            Finite => (&["alpha", "beta", "n", "t"], &[]),
            Painleve => (&["alpha", "beta", "n", "t"], &["ode-tol"]),
            Fredholm => (&["alpha", "s"], &["m", "check-doubling"]),
            Asymptotic => (&[], &["alpha", "beta", "n", "t", "s", "b"]),
            Mc => (&["alpha", "beta", "n", "t"], &["samples", "seed"]),
            Constant => (&["alpha", "s"], &["m", "check-doubling"]),
            Validate => (&["suite"], &["alpha", "beta", "n", "t", "s", "b", "m", "ode-tol"]),
        };
        for (flag, present) in set {
            if required.contains(&flag) && !present {
                return Err(ConfigError::Missing { command: c, flag });
            }
            if present && !required.contains(&flag) && !optional.contains(&flag) {
                return Err(ConfigError::Unused { command: c, flag });
            }
        }
        if let Some(bits) = self.bits {
            if bits < 53 {
                return Err(ConfigError::Invalid(format!("--bits {bits}: at least 53 required")));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > -1.0) {
                return Err(ConfigError::Invalid(format!("--alpha {a}: must exceed -1")));
            }
        }
        if let Some(b) = self.beta {
            if !(b > -1.0) {
                return Err(ConfigError::Invalid(format!("--beta {b}: must exceed -1")));
            }
        }
        if self.n == Some(0) {
            return Err(ConfigError::Invalid("--n must be at least 1".into()));
        }
        if let Some(t) = &self.t {
            if !(t.lo > 0.0 && t.hi < 1.0) {
                return Err(ConfigError::Invalid(format!("--t {t}: points must lie in (0, 1)")));
            }
        }
        for (flag, g) in [("s", &self.s), ("b", &self.b)] {
            if let Some(g) = g {
                if !(g.lo > 0.0) {
                    return Err(ConfigError::Invalid(format!("--{flag} {g}: points must be positive")));
                }
            }
        }
        if let Some(m) = self.m {
            if m < 4 {
                return Err(ConfigError::Invalid(format!("--m {m}: at least 4 points required")));
            }
        }
        if let Some(tol) = self.ode_tol {
            if !(tol > 0.0) {
                return Err(ConfigError::Invalid(format!("--ode-tol {tol}: must be positive")));
            }
        }
        match c {
            Asymptotic => {
                let grids = [self.t.is_some(), self.s.is_some(), self.b.is_some()].iter().filter(|g| **g).count();
                if grids != 1 {
                    return Err(ConfigError::Invalid("asymptotic takes exactly one of --t, --s, --b".into()));
                }
                if self.t.is_some() {
                    for (flag, present) in [("alpha", self.alpha.is_some()), ("beta", self.beta.is_some()), ("n", self.n.is_some())] {
                        if !present {
                            return Err(ConfigError::Missing { command: c, flag });
                        }
                    }
                }
                if self.s.is_some() && self.alpha.is_none() {
                    return Err(ConfigError::Missing { command: c, flag: "alpha" });
                }
            }
            Mc => {
                for (flag, v) in [("alpha", self.alpha), ("beta", self.beta)] {
                    let v = v.unwrap_or_default();
                    if v < 0.0 || v.fract() != 0.0 {
                        return Err(ConfigError::Invalid(format!("mc needs a non-negative integer --{flag}, got {v}")));
                    }
                }
                if self.samples.is_some_and(|s| s < 100) {
                    return Err(ConfigError::Invalid("--samples must be at least 100".into()));
                }
            }
            Constant => {
                let s = self.s.unwrap();
                if s.lo < 100.0 {
                    return Err(ConfigError::Invalid(format!("--s {s}: constant extraction needs s >= 100")));
                }
            }
            Validate => {
                let needs_ensemble = matches!(self.suite, Some(Suite::PainleveVsHankel | Suite::Identities));
                if needs_ensemble {
                    for (flag, present) in [("alpha", self.alpha.is_some()), ("beta", self.beta.is_some()), ("n", self.n.is_some())] {
                        if !present {
                            return Err(ConfigError::Missing { command: c, flag });
                        }
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        let g: Grid = "0.1:0.9:9".parse().unwrap();
        assert_eq!(g.points(), vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
        let g: Grid = "400:900:5:log".parse().unwrap();
        let p = g.points();
        assert_eq!((p[0], p[4]), (400.0, 900.0));
        assert!((p[2] - 600.0).abs() < 1e-9);
        assert_eq!("25".parse::<Grid>().unwrap().points(), vec![25.0]);
        assert_eq!(g.to_string(), "400:900:5:log");
        for bad in ["", "1:2", "2:1:3", "1:2:0", "0:1:3:log", "a:1:2", "1:2:3:cubic", "1:2:3:4:5"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn flags_are_checked_per_command() {
        let mut c = RunConfig::new(Command::Fredholm);
        assert!(matches!(c.validate(), Err(ConfigError::Missing { flag: "alpha", .. })));
        c.alpha = Some(0.5);
        c.s = Some(Grid::single(100.0));
        assert_eq!(c.validate(), Ok(()));
        c.samples = Some(1000);
        assert!(matches!(c.validate(), Err(ConfigError::Unused { flag: "samples", .. })));
    }

    #[test]
    fn value_constraints() {
        let mut c = RunConfig::new(Command::Mc);
        c.alpha = Some(1.5);
        c.beta = Some(2.0);
        c.n = Some(3);
        c.t = Some(Grid::single(0.1));
        assert!(c.validate().is_err());
        c.alpha = Some(1.0);
        assert_eq!(c.validate(), Ok(()));
        c.t = Some(Grid::single(1.0));
        assert!(c.validate().is_err());

        let mut k = RunConfig::new(Command::Constant);
        k.alpha = Some(1.0);
        k.s = Some("50:900:5:log".parse().unwrap());
        assert!(k.validate().is_err());
    }

    #[test]
    fn canonical_json_round_trips() {
        let mut c = RunConfig::new(Command::Finite);
        c.alpha = Some(1.0);
        c.t = Some("0.1:0.9:9".parse().unwrap());
        let j = c.canonical_json();
        assert!(!j.contains('\n'));
        let back: RunConfig = serde_json::from_str(&j).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.canonical_json(), j);
    }
}
