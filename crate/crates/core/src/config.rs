//! Run configuration: a line-oriented `key = value` format with defaults for
//! every key, so an empty file is a complete configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! lambda = 4
//! n_s    = 10
//! seed   = 7        # or `deterministic`
//! solver = quadrature
//! ```
//!
//! | key      | default         | meaning                                  |
//! |----------|-----------------|------------------------------------------|
//! | omega0   | 0.8288          | central-spin splitting ω₀                |
//! | beta     | 0.01            | transverse field β on every spin         |
//! | lambda0  | 1               | system-bath coupling λ₀                  |
//! | lambda   | 2               | intra-bath coupling λ                    |
//! | n_s      | 14              | number of bath spins                     |
//! | n_eig    | 20              | bath eigenstates kept in the ensemble    |
//! | kt       | 0.02            | temperature kT                           |
//! | omega_d  | 1               | Debye cutoff ω_D                         |
//! | seed     | deterministic   | frequency draw: quantiles or a seed      |
//! | dt       | 0.1             | integration step Δt                      |
//! | t_max    | 50              | end of the run                           |
//! | dt_out   | 0.1             | output spacing, a multiple of Δt         |
//! | n        | 50              | auxiliary grid points                    |
//! | solver   | grid            | mean-field solver: grid or quadrature    |
//! | out      | out             | output directory                         |
//! | svg      | false           | also write SVG plots                     |
//!
//! Energies are in units of ω_D with `ħ = 1`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bath::{debye_frequencies, FrequencyMode};
use crate::error::{Error, Result};
use crate::spin::ModelParams;

/// Largest bath accepted; the full register holds `2^(n_s+1)` amplitudes.
pub const MAX_BATH_SPINS: usize = 24;

/// Which mean-field solver a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MftSolver {
    Grid,
    Quadrature,
}

impl FromStr for MftSolver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "grid" => Ok(MftSolver::Grid),
            "quadrature" => Ok(MftSolver::Quadrature),
            _ => Err(format!("expected `grid` or `quadrature`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub omega0: f64,
    pub beta: f64,
    pub lambda0: f64,
    pub lambda: f64,
    pub n_s: usize,
    pub n_eig: usize,
    pub kt: f64,
    pub omega_d: f64,
    pub frequencies: FrequencyMode,
    pub dt: f64,
    pub t_max: f64,
    pub dt_out: f64,
    pub grid_n: usize,
    pub solver: MftSolver,
    pub out_dir: PathBuf,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega0: 0.8288,
            beta: 0.01,
            lambda0: 1.0,
            lambda: 2.0,
            n_s: 14,
            n_eig: 20,
            kt: 0.02,
            omega_d: 1.0,
            frequencies: FrequencyMode::Deterministic,
            dt: 0.1,
            t_max: 50.0,
            dt_out: 0.1,
            grid_n: 50,
            solver: MftSolver::Grid,
            out_dir: PathBuf::from("out"),
            svg: false,
        }
    }
}

pub const KEYS: &[&str] = &[
    "omega0", "beta", "lambda0", "lambda", "n_s", "n_eig", "kt", "omega_d", "seed", "dt", "t_max",
    "dt_out", "n", "solver", "out", "svg",
];

fn num<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse `{value}`"))
}

fn finite(value: &str) -> std::result::Result<f64, String> {
    let v: f64 = num(value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn positive(value: &str) -> std::result::Result<f64, String> {
    let v = finite(value)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err("must be positive".into())
    }
}

impl RunConfig {
    /// Smaller run for quick checks: `n_s = 10`, `n_eig = 8`, `t_max = 20`.
    pub fn apply_quick(&mut self) {
        self.n_s = 10;
        self.n_eig = 8;
        self.t_max = 20.0;
    }

    /// Sets one key. `origin` labels errors (`line 3`, `--set`).
    pub fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<()> {
        self.set_inner(key, value).map_err(|msg| Error::Config {
            origin: origin.to_string(),
            msg: format!("`{key}`: {msg}"),
        })
    }

    fn set_inner(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "omega0" => self.omega0 = finite(value)?,
            "beta" => self.beta = finite(value)?,
            "lambda0" => self.lambda0 = finite(value)?,
            "lambda" => self.lambda = finite(value)?,
            "n_s" => {
                let n: usize = num(value)?;
                if n == 0 || n > MAX_BATH_SPINS {
                    return Err(format!("must be between 1 and {MAX_BATH_SPINS}"));
                }
                self.n_s = n;
            }
            "n_eig" => {
                let n: usize = num(value)?;
                if n == 0 {
                    return Err("must be at least 1".into());
                }
                self.n_eig = n;
            }
            "kt" => self.kt = positive(value)?,
            "omega_d" => self.omega_d = positive(value)?,
            "seed" => {
                self.frequencies = if value == "deterministic" {
                    FrequencyMode::Deterministic
                } else {
                    FrequencyMode::Seeded(num(value)?)
                }
            }
            "dt" => self.dt = positive(value)?,
            "t_max" => self.t_max = positive(value)?,
            "dt_out" => self.dt_out = positive(value)?,
            "n" => {
                let n: usize = num(value)?;
                if n < 8 {
                    return Err("must be at least 8".into());
                }
                self.grid_n = n;
            }
            "solver" => self.solver = value.parse()?,
            "out" => {
                if value.is_empty() {
                    return Err("must not be empty".into());
                }
                self.out_dir = PathBuf::from(value);
            }
            "svg" => self.svg = num(value)?,
            _ => return Err(format!("unknown key (known: {})", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let origin = format!("line {}", i + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config {
                    origin,
                    msg: format!("expected `key = value`, got `{line}`"),
                });
            };
            self.set(key.trim(), value.trim(), &origin)?;
        }
        Ok(())
    }

    /// Defaults overlaid with `text`, then checked.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    /// Checks that involve more than one key.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| {
            Err(Error::Config {
                origin: "check".into(),
                msg,
            })
        };
        if (self.n_eig as u128) > 1u128 << self.n_s {
            return fail(format!(
                "`n_eig` = {} exceeds the 2^{} bath states",
                self.n_eig, self.n_s
            ));
        }
        if self.t_max < self.dt {
            return fail("`t_max` must be at least `dt`".into());
        }
        let stride = self.dt_out / self.dt;
        if (stride - stride.round()).abs() > 1e-9 || stride.round() < 1.0 {
            return fail("`dt_out` must be a positive multiple of `dt`".into());
        }
        let steps = self.t_max / self.dt_out;
        if (steps - steps.round()).abs() > 1e-9 {
            return fail("`t_max` must be a multiple of `dt_out`".into());
        }
        Ok(())
    }

    /// Model parameters with the bath frequencies drawn per `frequencies`.
    pub fn model_params(&self) -> Result<ModelParams> {
        let omegas = debye_frequencies(self.n_s, self.omega_d, self.frequencies)?;
        let params = ModelParams {
            omega0: self.omega0,
            beta: self.beta,
            lambda0: self.lambda0,
            lambda: self.lambda,
            omegas,
            kt: self.kt,
            n_eig: self.n_eig,
            omega_d: self.omega_d,
        };
        params.validate()?;
        Ok(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = RunConfig::parse_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!((cfg.omega0, cfg.beta, cfg.lambda0), (0.8288, 0.01, 1.0));
        assert_eq!((cfg.n_s, cfg.n_eig, cfg.kt), (14, 20, 0.02));
        assert_eq!((cfg.dt, cfg.grid_n), (0.1, 50));
    }

    #[test]
    fn single_override() {
        let cfg = RunConfig::parse_str("lambda = 4\n").unwrap();
        assert_eq!(
            cfg,
            RunConfig {
                lambda: 4.0,
                ..RunConfig::default()
            }
        );
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg =
            RunConfig::parse_str("# header\n\n  n_s=6 # small\nseed = 11\nsolver = quadrature\n")
                .unwrap();
        assert_eq!(cfg.n_s, 6);
        assert_eq!(cfg.frequencies, FrequencyMode::Seeded(11));
        assert_eq!(cfg.solver, MftSolver::Quadrature);
    }

    fn err(text: &str) -> String {
        RunConfig::parse_str(text).unwrap_err().to_string()
    }

    #[test]
    fn errors_carry_line_and_key() {
        let e = err("lambda = 2\nn_s = 0\n");
        assert!(
            e.contains("line 2") && e.contains("n_s") && e.contains("between 1"),
            "{e}"
        );
        let e = err("\n\nfoo = 1");
        assert!(e.contains("line 3") && e.contains("unknown key"), "{e}");
        let e = err("kt = -1");
        assert!(e.contains("line 1") && e.contains("positive"), "{e}");
        let e = err("dt 0.1");
        assert!(e.contains("line 1") && e.contains("key = value"), "{e}");
        let e = err("n = many");
        assert!(e.contains("cannot parse"), "{e}");
        let e = err("solver = spectral");
        assert!(e.contains("grid"), "{e}");
    }

    #[test]
    fn cross_key_checks() {
        assert!(err("n_s = 3\nn_eig = 9").contains("n_eig"));
        assert!(err("dt_out = 0.15").contains("dt_out"));
        assert!(err("t_max = 0.05").contains("t_max"));
        RunConfig::parse_str("dt_out = 0.5\nt_max = 20").unwrap();
    }

    #[test]
    fn quick_preset() {
        let mut cfg = RunConfig::default();
        cfg.apply_quick();
        assert_eq!((cfg.n_s, cfg.n_eig, cfg.t_max), (10, 8, 20.0));
    }

    #[test]
    fn model_params_follow_frequency_mode() {
        let mut cfg = RunConfig::parse_str("n_s = 4\nn_eig = 4").unwrap();
        let a = cfg.model_params().unwrap();
        assert_eq!(
            a.omegas,
            debye_frequencies(4, 1.0, FrequencyMode::Deterministic).unwrap()
        );
        cfg.set("seed", "5", "--seed").unwrap();
        let b = cfg.model_params().unwrap();
        assert_ne!(a.omegas, b.omegas);
        assert_eq!(b.omegas, cfg.model_params().unwrap().omegas);
    }
}
