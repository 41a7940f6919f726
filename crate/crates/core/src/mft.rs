//! Mean-field non-Markovian master equation for the central spin.
//!
//! ```text
//! dρ/dt = −i[ω₀/2 σz + β̃ σx, ρ] − 2C (χ(t,0) − σx χ(t,0) σx)
//! χ(t,u) = f(u) ∫₀ᵗ W(t − t′ + u) ρ(t′) dt′,   f(u) = e^{−g u²}
//! ```
//!
//! [`solve_mft`] replaces the memory integral by the auxiliary field
//! `χ(t, u_j)` on a uniform `u` grid, which obeys
//! `∂χ/∂t = f W ρ + ∂χ/∂u + 2guχ`.
//! [`solve_mft_quadrature`] integrates the integro-differential form
//! directly and is the reference for the grid method.
//!
//! Along characteristics `u + t = const` the field moves toward negative
//! `u` while `2gu` amplifies it by up to `e^{g u_max²}`. The whole-line
//! operator `∂u + 2gu` has square-integrable eigenfunctions
//! `e^{λu − gu²}` with `Re λ = 2g u_c > 0`; a derivative that couples to
//! downstream points, such as the sinc DVR, keeps these alive on the
//! truncated grid and the solve diverges. The default
//! [`GridScheme::Upwind`] uses one-sided differences over upstream nodes
//! only, with `χ = 0` beyond `u_max`, which is the inflow condition implied
//! by the damping.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bath::MeanFieldCoupling;
use crate::error::{invalid, Error, Result};
use crate::kernel::{memory_function, KernelParams};
use crate::observables::{DensityMatrix2, ReducedTrajectory};
use crate::ode::{step_count, OdeSystem, Rk8};

/// 2×2 complex matrix in the `(|1⟩, |0⟩)` ordering.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ZERO2: Mat2 = [[ZERO; 2]; 2];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = ZERO2;
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// `σx m σx`: swaps both indices.
fn flip(m: &Mat2) -> Mat2 {
    [[m[1][1], m[1][0]], [m[0][1], m[0][0]]]
}

/// The ingredients of one mean-field solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MftProblem {
    pub omega0: f64,
    pub coupling: MeanFieldCoupling,
    pub kernel: KernelParams,
}

impl MftProblem {
    fn system_hamiltonian(&self) -> Mat2 {
        let z = self.omega0 / 2.0;
        let b = Complex64::new(self.coupling.beta_eff, 0.0);
        [[Complex64::new(z, 0.0), b], [b, Complex64::new(-z, 0.0)]]
    }

    /// `dρ/dt` given the memory term `m = χ(t, 0)`.
    fn drho(&self, h: &Mat2, rho: &Mat2, m: &Mat2) -> Mat2 {
        let hr = mul(h, rho);
        let rh = mul(rho, h);
        let fm = flip(m);
        let c2 = 2.0 * self.coupling.c;
        let mut out = ZERO2;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = -Complex64::i() * (hr[i][j] - rh[i][j]) - c2 * (m[i][j] - fm[i][j]);
            }
        }
        out
    }
}

/// Uniform auxiliary grid `u_j = (n − l − j)Δt`, `j = 1…n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxGrid {
    pub n: usize,
    pub l: usize,
    pub dt: f64,
    /// Descending from `(n − l − 1)Δt` to `−lΔt`.
    pub u: Vec<f64>,
    pub g: f64,
    /// `e^{−g u_j²}`.
    pub f: Vec<f64>,
    /// `∂/∂u` on the grid.
    pub d: DMatrix<f64>,
    /// Index with `u = 0`.
    pub j0: usize,
}

/// Fraction of the grid placed at negative `u`.
pub const GRID_SPLIT: f64 = 0.338;
/// Damping scale: `g = GRID_DAMPING / ((n − l)Δt)²`.
pub const GRID_DAMPING: f64 = 11.0;

pub fn build_grid(n: usize, dt: f64) -> Result<AuxGrid> {
    if n < 8 {
        return Err(invalid("n", "grid needs at least 8 points"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid("dt", "must be positive"));
    }
    let l = (GRID_SPLIT * n as f64).floor() as usize;
    let u: Vec<f64> = (1..=n)
        .map(|j| (n as f64 - l as f64 - j as f64) * dt)
        .collect();
    let span = (n - l) as f64 * dt;
    let g = GRID_DAMPING / (span * span);
    let f = u.iter().map(|&x| (-g * x * x).exp()).collect();
    let d = dvr_derivative(&u)?;
    Ok(AuxGrid {
        n,
        l,
        dt,
        j0: n - l - 1,
        u,
        g,
        f,
        d,
    })
}

/// Sinc-DVR first derivative `D_jk = (−1)^{j−k} / (u_j − u_k)`, zero diagonal.
///
/// On an ascending grid this is `(−1)^{j−k}/(Δt (j − k))`; writing it in
/// terms of `u` keeps the sign right for either ordering.
pub fn dvr_derivative(u: &[f64]) -> Result<DMatrix<f64>> {
    let n = u.len();
    if n < 2 {
        return Err(invalid("u", "grid needs at least two points"));
    }
    let h = u[1] - u[0];
    for w in u.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs() || h == 0.0 {
            return Err(invalid("u", "grid must be uniform"));
        }
    }
    Ok(DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            0.0
        } else {
            let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
            sign / (h * (j as f64 - k as f64))
        }
    }))
}

/// Discretization of `∂/∂u` used by [`solve_mft`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScheme {
    /// One-sided differences of the given order over upstream nodes.
    Upwind { order: usize },
    /// The sinc DVR matrix [`AuxGrid::d`]. Linearly unstable whenever the
    /// grid has more positive than negative `u`; kept for comparison.
    SincDvr,
}

impl Default for GridScheme {
    fn default() -> Self {
        GridScheme::Upwind { order: 4 }
    }
}

impl GridScheme {
    /// The `n × n` matrix standing in for `∂/∂u` on `grid`.
    pub fn matrix(&self, grid: &AuxGrid) -> Result<DMatrix<f64>> {
        match *self {
            GridScheme::SincDvr => Ok(grid.d.clone()),
            GridScheme::Upwind { order } => upwind_derivative(&grid.u, order),
        }
    }
}

/// Finite-difference weights for the first derivative at `z` from nodes `x`.
fn fd_weights(z: f64, x: &[f64]) -> Vec<f64> {
    // Fornberg's recursion, derivative orders 0 and 1.
    let n = x.len();
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                c[i][1] = c1 * (c[i - 1][0] - c5 * c[i - 1][1]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            c[j][1] = (c4 * c[j][1] - c[j][0]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// One-sided `∂/∂u` from node `j` and up to `order` nodes upstream of it
/// (larger `u`, lower index). The order drops near the top of the grid; the
/// top node sees a zero ghost value above it.
pub fn upwind_derivative(u: &[f64], order: usize) -> Result<DMatrix<f64>> {
    let n = u.len();
    if !(1..=4).contains(&order) {
        return Err(invalid("order", "upwind order must be 1 to 4"));
    }
    if n < 2 || !(u[0] > u[1]) {
        return Err(invalid("u", "grid must be descending"));
    }
    let h = u[0] - u[1];
    let mut d = DMatrix::zeros(n, n);
    d[(0, 0)] = -1.0 / h;
    for j in 1..n {
        let o = order.min(j);
        let offsets: Vec<f64> = (0..=o).map(|k| k as f64 * h).collect();
        for (k, wk) in fd_weights(0.0, &offsets).into_iter().enumerate() {
            d[(j, j - k)] = wk;
        }
    }
    Ok(d)
}

/// `ρ` together with the auxiliary field on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MftState {
    pub rho: Mat2,
    pub chi: Vec<Mat2>,
}

impl MftState {
    /// `ρ = |1⟩⟨1|`, `χ = 0`.
    pub fn initial(n: usize) -> Self {
        Self {
            rho: DensityMatrix2::excited().to_matrix(),
            chi: vec![ZERO2; n],
        }
    }

    fn as_flat(&self) -> Vec<f64> {
        let mut v: Vec<Complex64> = Vec::with_capacity(4 * (self.chi.len() + 1));
        for m in std::iter::once(&self.rho).chain(&self.chi) {
            v.extend(m.iter().flatten());
        }
        bytemuck::cast_slice(&v).to_vec()
    }
}

fn mats(y: &[f64]) -> &[Mat2] {
    bytemuck::cast_slice(y)
}

fn mats_mut(y: &mut [f64]) -> &mut [Mat2] {
    bytemuck::cast_slice_mut(y)
}

/// Time derivative of an [`MftState`].
pub fn mft_rhs(
    state: &MftState,
    problem: &MftProblem,
    grid: &AuxGrid,
    scheme: GridScheme,
) -> Result<MftState> {
    if state.chi.len() != grid.n {
        return Err(Error::DimensionMismatch {
            expected: grid.n,
            got: state.chi.len(),
        });
    }
    let mut sys = GridSystem::new(problem, grid, scheme)?;
    let y = state.as_flat();
    let mut dy = vec![0.0; y.len()];
    sys.rhs(0.0, &y, &mut dy);
    let m = mats(&dy);
    Ok(MftState {
        rho: m[0],
        chi: m[1..].to_vec(),
    })
}

struct GridSystem<'a> {
    problem: &'a MftProblem,
    grid: &'a AuxGrid,
    op: DMatrix<f64>,
    h: Mat2,
    /// `f(u_j) W(u_j)`.
    source: Vec<f64>,
    /// `2 g u_j`.
    growth: Vec<f64>,
}

impl<'a> GridSystem<'a> {
    fn new(problem: &'a MftProblem, grid: &'a AuxGrid, scheme: GridScheme) -> Result<Self> {
        Ok(Self {
            problem,
            grid,
            op: scheme.matrix(grid)?,
            h: problem.system_hamiltonian(),
            source: grid
                .u
                .iter()
                .zip(&grid.f)
                .map(|(&u, &f)| f * memory_function(&problem.kernel, u))
                .collect(),
            growth: grid.u.iter().map(|&u| 2.0 * grid.g * u).collect(),
        })
    }
}

impl OdeSystem for GridSystem<'_> {
    fn dim(&self) -> usize {
        8 * (self.grid.n + 1)
    }

    fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let y = mats(y);
        let dy = mats_mut(dy);
        let (rho, chi) = (&y[0], &y[1..]);
        dy[0] = self.problem.drho(&self.h, rho, &chi[self.grid.j0]);
        let d = &self.op;
        for j in 0..self.grid.n {
            let mut acc = ZERO2;
            for (k, c) in chi.iter().enumerate() {
                let djk = d[(j, k)];
                if djk == 0.0 {
                    continue;
                }
                for a in 0..2 {
                    for b in 0..2 {
                        acc[a][b] += c[a][b] * djk;
                    }
                }
            }
            let out = &mut dy[j + 1];
            for a in 0..2 {
                for b in 0..2 {
                    out[a][b] =
                        rho[a][b] * self.source[j] + acc[a][b] + chi[j][a][b] * self.growth[j];
                }
            }
        }
    }
}

/// Largest `|Tr ρ − 1|` tolerated before a solve aborts.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

fn check_trace(rho: &Mat2, t: f64) -> Result<()> {
    let drift = (rho[0][0] + rho[1][1] - 1.0).norm();
    if !(drift <= TRACE_DRIFT_LIMIT) {
        return Err(Error::Drift {
            quantity: "trace",
            t,
            drift,
            limit: TRACE_DRIFT_LIMIT,
        });
    }
    Ok(())
}

fn check_span(t_max: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid("dt", "must be positive"));
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(invalid("t_max", "must be positive"));
    }
    Ok(())
}

/// Integrates the grid equations from `ρ = |1⟩⟨1|`, `χ = 0` with RK8 at
/// step `dt`, recording `ρ` after every step.
pub fn solve_mft(
    problem: &MftProblem,
    grid: &AuxGrid,
    scheme: GridScheme,
    t_max: f64,
    dt: f64,
) -> Result<ReducedTrajectory> {
    check_span(t_max, dt)?;
    let mut sys = GridSystem::new(problem, grid, scheme)?;
    let mut y = MftState::initial(grid.n).as_flat();
    let mut rk = Rk8::new(y.len());
    let steps = step_count(t_max, dt);
    let mut traj = ReducedTrajectory::with_capacity(steps + 1);
    traj.push(0.0, DensityMatrix2::excited());
    let mut t = 0.0;
    for i in 1..=steps {
        let t_next = if i == steps { t_max } else { i as f64 * dt };
        rk.step(&mut sys, t, &mut y, t_next - t)?;
        t = t_next;
        let rho = mats(&y)[0];
        check_trace(&rho, t)?;
        traj.push(t, DensityMatrix2::from_matrix(rho));
    }
    Ok(traj)
}

/// Internal steps per output step of the quadrature reference; at
/// `dt = 0.1` this keeps its second-order error near `1e-5`.
pub const QUADRATURE_SUBSTEPS: usize = 32;

/// Heun predictor-corrector on the integro-differential equation with a
/// trapezoid memory sum over the stored history; `O(steps²)` work.
///
/// Internally steps at `dt / substeps` and records every `substeps`-th
/// state, so the output grid matches [`solve_mft`] at the same `dt`.
pub fn solve_mft_quadrature(
    problem: &MftProblem,
    t_max: f64,
    dt: f64,
    substeps: usize,
) -> Result<ReducedTrajectory> {
    check_span(t_max, dt)?;
    if substeps == 0 {
        return Err(invalid("substeps", "must be at least 1"));
    }
    let r = t_max / dt;
    if (r - r.round()).abs() > 1e-9 * r.max(1.0) {
        return Err(invalid(
            "t_max",
            "must be a multiple of dt for the quadrature reference",
        ));
    }
    let n_out = r.round() as usize;
    let steps = n_out * substeps;
    let h = t_max / steps as f64;
    let hs = problem.system_hamiltonian();
    let w: Vec<f64> = (0..=steps)
        .map(|k| memory_function(&problem.kernel, k as f64 * h))
        .collect();

    let mut hist: Vec<Mat2> = Vec::with_capacity(steps + 1);
    hist.push(DensityMatrix2::excited().to_matrix());
    // trapezoid ∫₀^{t_n} W(t_n − t′) ρ(t′) dt′ with ρ(t_n) = last
    let memory = |hist: &[Mat2], last: &Mat2| -> Mat2 {
        let n = hist.len();
        let mut acc = ZERO2;
        if n == 0 {
            return acc;
        }
        for (k, r) in hist.iter().enumerate() {
            let wt = if k == 0 { 0.5 * w[n] } else { w[n - k] };
            for a in 0..2 {
                for b in 0..2 {
                    acc[a][b] += r[a][b] * wt;
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                acc[a][b] = (acc[a][b] + last[a][b] * (0.5 * w[0])) * h;
            }
        }
        acc
    };

    let mut traj = ReducedTrajectory::with_capacity(n_out + 1);
    traj.push(0.0, DensityMatrix2::excited());
    let mut m_n = ZERO2;
    for i in 1..=steps {
        let rho = *hist.last().expect("history starts non-empty");
        let f0 = problem.drho(&hs, &rho, &m_n);
        let mut pred = ZERO2;
        for a in 0..2 {
            for b in 0..2 {
                pred[a][b] = rho[a][b] + f0[a][b] * h;
            }
        }
        let m_pred = memory(&hist, &pred);
        let f1 = problem.drho(&hs, &pred, &m_pred);
        let mut next = ZERO2;
        for a in 0..2 {
            for b in 0..2 {
                next[a][b] = rho[a][b] + (f0[a][b] + f1[a][b]) * (0.5 * h);
            }
        }
        if next
            .iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite { t: i as f64 * h });
        }
        m_n = memory(&hist, &next);
        hist.push(next);
        let t = i as f64 * h;
        check_trace(&next, t)?;
        if i % substeps == 0 {
            traj.push(
                if i == steps { t_max } else { t },
                DensityMatrix2::from_matrix(next),
            );
        }
    }
    Ok(traj)
}
