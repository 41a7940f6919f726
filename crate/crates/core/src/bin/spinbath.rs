use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spinbath::config::RunConfig;
use spinbath::run::{self, RunReport};

#[derive(Parser)]
#[command(
    name = "spinbath",
    version,
    about = "Central spin in a self-interacting spin bath"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Thermal ensemble of exact Schrödinger trajectories.
    Exact,
    /// Mean-field master equation.
    Mft {
        /// Auxiliary grid points.
        #[arg(long)]
        n: Option<usize>,
        /// `grid` or `quadrature`.
        #[arg(long)]
        solver: Option<String>,
    },
    /// Memory-function moments and `W(t)`.
    Kernel,
    /// Bath eigenenergies, weights and `Σx` statistics.
    Bath,
    /// Exact, mean-field and coupling-free runs on one time grid.
    Compare,
}

#[derive(Args)]
struct Common {
    /// `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set lambda=4`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Draw bath frequencies from this seed instead of the quantiles.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// n_s = 10, n_eig = 8, t_max = 20.
    #[arg(long, global = true)]
    quick: bool,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    svg: bool,
    #[arg(long, value_name = "DIR", global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long = "t-max", global = true)]
    t_max: Option<f64>,
}

fn config(cli: &Cli) -> spinbath::Result<RunConfig> {
    let c = &cli.common;
    let mut cfg = RunConfig::default();
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            spinbath::Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        })?;
        cfg.apply_text(&text)?;
    }
    if c.quick {
        cfg.apply_quick();
    }
    let mut flag = |key: &str, value: String, origin: &str| cfg.set(key, &value, origin);
    if let Some(v) = c.lambda {
        flag("lambda", v.to_string(), "--lambda")?;
    }
    if let Some(v) = c.dt {
        flag("dt", v.to_string(), "--dt")?;
        flag("dt_out", v.to_string(), "--dt")?;
    }
    if let Some(v) = c.t_max {
        flag("t_max", v.to_string(), "--t-max")?;
    }
    if let Some(v) = c.seed {
        flag("seed", v.to_string(), "--seed")?;
    }
    if let Command::Mft { n, solver } = &cli.command {
        if let Some(v) = n {
            flag("n", v.to_string(), "--n")?;
        }
        if let Some(v) = solver {
            flag("solver", v.clone(), "--solver")?;
        }
    }
    for kv in &c.set {
        let (k, v) = kv.split_once('=').unwrap_or((kv, ""));
        cfg.set(k.trim(), v.trim(), "--set")?;
    }
    if let Some(dir) = &c.out {
        cfg.out_dir = dir.clone();
    }
    cfg.svg |= c.svg;
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> spinbath::Result<RunReport> {
    let cfg = config(cli)?;
    let progress = |msg: &str| eprintln!("{msg}");
    match cli.command {
        Command::Exact => run::run_exact(&cfg, &progress),
        Command::Mft { .. } => run::run_mft(&cfg, &progress),
        Command::Kernel => run::run_kernel(&cfg, &progress),
        Command::Bath => run::run_bath(&cfg, &progress),
        Command::Compare => run::run_compare(&cfg, &progress),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            for (k, v) in &report.summary {
                println!("{k} = {}", run::fmt_value(*v));
            }
            for f in &report.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
