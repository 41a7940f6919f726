//! Orchestration behind the command-line subcommands. Each `run_*` writes
//! its CSV (and optional SVG) files into `cfg.out_dir` and returns the paths
//! with a few summary numbers; files from a failed run are removed.

use std::path::{Path, PathBuf};

use crate::bath::{BathEnsemble, LanczosOptions};
use crate::config::{MftSolver, RunConfig};
use crate::error::{Error, Result};
use crate::exact::{thermal_reduced_density, two_level_free, ExactOptions};
use crate::kernel::{model_kernel, KernelParams};
use crate::mft::{
    build_grid, solve_mft, solve_mft_quadrature, GridScheme, MftProblem, QUADRATURE_SUBSTEPS,
};
use crate::observables::ReducedTrajectory;
use crate::spin::ModelParams;
use crate::svg::{emit_svg, Series};

/// Sink for progress messages.
pub type Progress<'a> = &'a (dyn Fn(&str) + Sync);

pub fn quiet(_: &str) {}

pub const COMPARE_HEADER: [&str; 12] = [
    "t", "S_exact", "X_exact", "Y_exact", "Z_exact", "S_mft", "X_mft", "Y_mft", "Z_mft", "X_free",
    "Y_free", "Z_free",
];
pub const OBSERVABLE_HEADER: [&str; 5] = ["t", "S", "X", "Y", "Z"];
const NAMES: [&str; 4] = ["S", "X", "Y", "Z"];

/// Nine significant digits.
pub fn fmt_value(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    /// `(name, value)` pairs for the standard-output summary.
    pub summary: Vec<(String, f64)>,
}

/// Files written so far; removed on drop unless committed.
struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
    committed: bool,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            committed: false,
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    fn csv(
        &mut self,
        name: &str,
        comment: Option<&str>,
        header: &[&str],
        rows: &[Vec<f64>],
    ) -> Result<()> {
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| fmt_value(v)).collect())
            .collect();
        self.csv_cells(name, comment, header, &cells)
    }

    fn csv_cells(
        &mut self,
        name: &str,
        comment: Option<&str>,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<()> {
        let path = self.path(name);
        let mut buf = Vec::new();
        if let Some(c) = comment {
            buf.extend_from_slice(format!("# {c}\n").as_bytes());
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header).map_err(csv_err)?;
            for row in rows {
                w.write_record(row).map_err(csv_err)?;
            }
            w.flush()?;
        }
        std::fs::write(path, buf)?;
        Ok(())
    }

    fn svg(&mut self, name: &str, series: &[Series], title: &str) -> Result<()> {
        let path = self.path(name);
        emit_svg(series, title, "t", &path)
    }

    fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Model parameters and the thermal bath ensemble.
pub struct Prepared {
    pub params: ModelParams,
    pub bath: BathEnsemble,
}

pub fn prepare(cfg: &RunConfig, progress: Progress) -> Result<Prepared> {
    cfg.validate()?;
    let params = cfg.model_params()?;
    progress(&format!(
        "bath: {} lowest states of {} spins",
        params.n_eig,
        params.n_s()
    ));
    let bath = BathEnsemble::build(&params, &LanczosOptions::default())?;
    Ok(Prepared { params, bath })
}

fn exact_options(cfg: &RunConfig) -> ExactOptions {
    ExactOptions {
        dt_out: cfg.dt_out,
        ..ExactOptions::new(cfg.t_max, cfg.dt)
    }
}

pub fn exact_trajectory(
    cfg: &RunConfig,
    prep: &Prepared,
    progress: Progress,
) -> Result<ReducedTrajectory> {
    progress(&format!(
        "exact: {} trajectories to t = {}",
        prep.bath.n_eig(),
        cfg.t_max
    ));
    thermal_reduced_density(&prep.params, &prep.bath, &exact_options(cfg))
}

pub fn mft_problem(prep: &Prepared) -> Result<MftProblem> {
    Ok(MftProblem {
        omega0: prep.params.omega0,
        coupling: prep.bath.mean_field(&prep.params),
        kernel: model_kernel(&prep.params, &prep.bath, prep.bath.n_eig())?,
    })
}

/// Mean-field run sampled every `dt_out`.
pub fn mft_trajectory(
    cfg: &RunConfig,
    problem: &MftProblem,
    progress: Progress,
) -> Result<ReducedTrajectory> {
    let full = match cfg.solver {
        MftSolver::Grid => {
            progress(&format!("mft: grid solve, n = {}", cfg.grid_n));
            let grid = build_grid(cfg.grid_n, cfg.dt)?;
            solve_mft(problem, &grid, GridScheme::default(), cfg.t_max, cfg.dt)?
        }
        MftSolver::Quadrature => {
            progress("mft: quadrature solve");
            solve_mft_quadrature(problem, cfg.t_max, cfg.dt, QUADRATURE_SUBSTEPS)?
        }
    };
    let stride = (cfg.dt_out / cfg.dt).round() as usize;
    let mut out = ReducedTrajectory::with_capacity(full.len() / stride + 1);
    for i in (0..full.len()).step_by(stride) {
        out.push(full.times[i], full.densities[i]);
    }
    Ok(out)
}

pub fn free_trajectory(omega0: f64, beta: f64, times: &[f64]) -> ReducedTrajectory {
    let mut out = ReducedTrajectory::with_capacity(times.len());
    for &t in times {
        out.push(t, two_level_free(omega0, beta, t));
    }
    out
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn observable_rows(traj: &ReducedTrajectory) -> Vec<Vec<f64>> {
    traj.times
        .iter()
        .zip(traj.observables())
        .map(|(&t, o)| std::iter::once(t).chain(o).collect())
        .collect()
}

fn observable_svgs(
    out: &mut Outputs,
    prefix: &str,
    curves: &[(&str, &ReducedTrajectory)],
) -> Result<()> {
    for (k, name) in NAMES.iter().enumerate() {
        let series: Vec<Series> = curves
            .iter()
            .filter(|(label, _)| k > 0 || !label.ends_with("free"))
            .map(|(label, tr)| Series::new(*label, tr.times.clone(), tr.column(k)))
            .collect();
        out.svg(
            &format!("{prefix}_{name}.svg"),
            &series,
            &format!("{name}(t)"),
        )?;
    }
    Ok(())
}

fn trajectory_summary(prefix: &str, traj: &ReducedTrajectory) -> Vec<(String, f64)> {
    NAMES
        .iter()
        .enumerate()
        .map(|(k, n)| (format!("{prefix}_mean_{n}"), mean(&traj.column(k))))
        .collect()
}

/// Writes `bath.csv`: `m, epsilon_m, p_m` after a comment line with the
/// canonical `Σx` mean and variance.
pub fn run_bath(cfg: &RunConfig, progress: Progress) -> Result<RunReport> {
    let prep = prepare(cfg, progress)?;
    let b = &prep.bath;
    let mut out = Outputs::new(&cfg.out_dir)?;
    let rows: Vec<Vec<String>> = (0..b.n_eig())
        .map(|m| {
            vec![
                (m + 1).to_string(),
                fmt_value(b.energies[m]),
                fmt_value(b.weights[m]),
            ]
        })
        .collect();
    let comment = format!(
        "sigma_x_mean = {}, sigma_x_var = {}",
        fmt_value(b.sigma_x_mean),
        fmt_value(b.sigma_x_var)
    );
    out.csv_cells(
        "bath.csv",
        Some(&comment),
        &["m", "epsilon_m", "p_m"],
        &rows,
    )?;
    let mf = b.mean_field(&prep.params);
    Ok(RunReport {
        files: out.commit(),
        summary: vec![
            ("sigma_x_mean".into(), b.sigma_x_mean),
            ("sigma_x_var".into(), b.sigma_x_var),
            ("beta_eff".into(), mf.beta_eff),
            ("c".into(), mf.c),
        ],
    })
}

fn kernel_summary(tag: &str, k: &KernelParams) -> Vec<(String, f64)> {
    vec![
        (format!("aad{tag}"), k.aad),
        (format!("aa{tag}"), k.aa),
        (format!("p{tag}"), k.p),
        (format!("q{tag}"), k.q),
    ]
}

/// Memory-function parameters at `m_b = n_eig` (and `n_eig − 2`) and
/// `kernel.csv` with `t, W`.
pub fn run_kernel(cfg: &RunConfig, progress: Progress) -> Result<RunReport> {
    let prep = prepare(cfg, progress)?;
    let m_b = prep.bath.n_eig();
    progress(&format!("kernel: moments at m_b = {m_b}"));
    let k = model_kernel(&prep.params, &prep.bath, m_b)?;
    let mut summary = kernel_summary("", &k);
    if m_b > 2 {
        let k2 = model_kernel(&prep.params, &prep.bath, m_b - 2)?;
        summary.extend(kernel_summary(&format!("_mb{}", m_b - 2), &k2));
    }
    let steps = (cfg.t_max / cfg.dt_out).round() as usize;
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 * cfg.dt_out).collect();
    let w: Vec<f64> = times.iter().map(|&t| k.memory(t)).collect();
    let rows: Vec<Vec<f64>> = times.iter().zip(&w).map(|(&t, &v)| vec![t, v]).collect();
    let mut out = Outputs::new(&cfg.out_dir)?;
    out.csv("kernel.csv", None, &["t", "W"], &rows)?;
    if cfg.svg {
        out.svg("kernel_W.svg", &[Series::new("W", times, w)], "W(t)")?;
    }
    Ok(RunReport {
        files: out.commit(),
        summary,
    })
}

/// `exact.csv` with `t, S, X, Y, Z`.
pub fn run_exact(cfg: &RunConfig, progress: Progress) -> Result<RunReport> {
    let prep = prepare(cfg, progress)?;
    let traj = exact_trajectory(cfg, &prep, progress)?;
    let mut out = Outputs::new(&cfg.out_dir)?;
    out.csv(
        "exact.csv",
        None,
        &OBSERVABLE_HEADER,
        &observable_rows(&traj),
    )?;
    if cfg.svg {
        observable_svgs(&mut out, "exact", &[("exact", &traj)])?;
    }
    Ok(RunReport {
        files: out.commit(),
        summary: trajectory_summary("exact", &traj),
    })
}

/// `mft.csv` with `t, S, X, Y, Z`.
pub fn run_mft(cfg: &RunConfig, progress: Progress) -> Result<RunReport> {
    let prep = prepare(cfg, progress)?;
    let problem = mft_problem(&prep)?;
    let traj = mft_trajectory(cfg, &problem, progress)?;
    let mut out = Outputs::new(&cfg.out_dir)?;
    out.csv("mft.csv", None, &OBSERVABLE_HEADER, &observable_rows(&traj))?;
    if cfg.svg {
        observable_svgs(&mut out, "mft", &[("mean field", &traj)])?;
    }
    let mut summary = vec![
        ("beta_eff".into(), problem.coupling.beta_eff),
        ("c".into(), problem.coupling.c),
        ("p".into(), problem.kernel.p),
        ("q".into(), problem.kernel.q),
    ];
    summary.extend(trajectory_summary("mft", &traj));
    Ok(RunReport {
        files: out.commit(),
        summary,
    })
}

/// Exact, mean-field and coupling-free trajectories on one time grid in
/// `compare.csv`; the exact ensemble and the mean-field solve run
/// concurrently.
pub fn run_compare(cfg: &RunConfig, progress: Progress) -> Result<RunReport> {
    let prep = prepare(cfg, progress)?;
    let problem = mft_problem(&prep)?;
    let (exact, mft) = rayon::join(
        || exact_trajectory(cfg, &prep, progress),
        || mft_trajectory(cfg, &problem, progress),
    );
    let (exact, mft) = (exact?, mft?);
    if exact.len() != mft.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            got: mft.len(),
        });
    }
    let free = free_trajectory(cfg.omega0, cfg.beta, &exact.times);
    let rows: Vec<Vec<f64>> = (0..exact.len())
        .map(|i| {
            let (e, m, f) = (
                crate::observables::observables(&exact.densities[i]),
                crate::observables::observables(&mft.densities[i]),
                crate::observables::observables(&free.densities[i]),
            );
            let mut row = vec![exact.times[i]];
            row.extend(e);
            row.extend(m);
            row.extend(&f[1..]);
            row
        })
        .collect();
    let mut out = Outputs::new(&cfg.out_dir)?;
    out.csv("compare.csv", None, &COMPARE_HEADER, &rows)?;
    if cfg.svg {
        observable_svgs(
            &mut out,
            "compare",
            &[("exact", &exact), ("mean field", &mft), ("free", &free)],
        )?;
    }
    let mut summary = trajectory_summary("exact", &exact);
    summary.extend(trajectory_summary("mft", &mft));
    Ok(RunReport {
        files: out.commit(),
        summary,
    })
}
