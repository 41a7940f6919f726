//! Exact thermal-ensemble dynamics of the central spin.
//!
//! Each bath eigenstate `|m⟩` of the ensemble starts as `|1⟩ ⊗ |m⟩` and is
//! propagated under the full Hamiltonian with the fixed-step RK8 scheme.
//! The reduced density is the Boltzmann-weighted sum of the per-trajectory
//! partial traces.
//!
//! The explicit scheme is only stable for `h·ρ(H − E) ≲ 6`, and the pair
//! coupling pushes the spectral radius to `~λ n_s²/2`. Each output step
//! `dt` is therefore split into substeps chosen from
//! [`ModelParams::spectral_bounds`], and the generator is shifted by the
//! initial energy `E` (a global phase, restored on output).

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::bath::BathEnsemble;
use crate::error::{invalid, Error, Result};
use crate::observables::{DensityMatrix2, ReducedTrajectory};
use crate::ode::{step_count, OdeSystem, Rk8};
use crate::spin::{reduce_amplitudes, ModelParams, PureState, SpinHamiltonian};

/// Time-stepping controls for Schrödinger propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorOptions {
    /// Output step.
    pub dt: f64,
    /// Minimum number of RK8 substeps per output step.
    pub substeps: usize,
    /// Largest `h · max|E − E_ref|` allowed for a substep.
    pub max_phase: f64,
    /// Abort when `|‖ψ‖² − 1|` exceeds this.
    pub norm_tol: f64,
}

impl Default for PropagatorOptions {
    fn default() -> Self {
        Self {
            dt: 0.1,
            substeps: 1,
            max_phase: 2.0,
            norm_tol: 1e-6,
        }
    }
}

impl PropagatorOptions {
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt,
            ..Self::default()
        }
    }

    /// Substeps per output step for a reference energy `e_ref`.
    pub fn substeps_for(&self, params: &ModelParams, e_ref: f64) -> usize {
        let (lo, hi) = params.spectral_bounds();
        let reach = (hi - e_ref).max(e_ref - lo);
        let needed = (self.dt * reach / self.max_phase).ceil() as usize;
        needed.max(self.substeps).max(1)
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(invalid("dt", "must be positive"));
        }
        if !(self.max_phase > 0.0) {
            return Err(invalid("max_phase", "must be positive"));
        }
        Ok(())
    }
}

/// `dψ/dt = −i (H − E_ref) ψ` on interleaved real storage.
struct Schrodinger<'a> {
    h: &'a SpinHamiltonian,
    shift: f64,
    scratch: Vec<Complex64>,
}

impl OdeSystem for Schrodinger<'_> {
    fn dim(&self) -> usize {
        2 * self.h.dim()
    }

    fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let psi: &[Complex64] = bytemuck::cast_slice(y);
        let out: &mut [Complex64] = bytemuck::cast_slice_mut(dy);
        out.fill(Complex64::zero());
        self.h
            .accumulate(psi, out, &mut self.scratch, -Complex64::i())
            .expect("register size fixed at construction");
        let s = Complex64::new(0.0, self.shift);
        for (o, p) in out.iter_mut().zip(psi) {
            *o += s * p;
        }
    }
}

/// Propagates `state0` to `t_max`, calling `observer(t, ψ(t))` at every
/// output step (multiples of `opts.dt`; the last one lands on `t_max`).
pub fn propagate_schrodinger<O>(
    state0: &PureState,
    params: &ModelParams,
    t_max: f64,
    opts: &PropagatorOptions,
    mut observer: O,
) -> Result<PureState>
where
    O: FnMut(f64, &PureState) -> Result<()>,
{
    let h = SpinHamiltonian::model(params);
    propagate_raw(state0, &h, params, t_max, opts, |t, amps, phase| {
        let lab = amps.iter().map(|a| a * phase).collect();
        observer(t, &PureState::new(state0.n_qubits(), lab)?)
    })
}

/// As [`propagate_schrodinger`] but hands the observer the rotating-frame
/// amplitudes `e^{iE_ref t} ψ(t)` together with the phase `e^{−iE_ref t}`
/// that restores the lab frame.
fn propagate_raw<O>(
    state0: &PureState,
    h: &SpinHamiltonian,
    params: &ModelParams,
    t_max: f64,
    opts: &PropagatorOptions,
    mut observer: O,
) -> Result<PureState>
where
    O: FnMut(f64, &[Complex64], Complex64) -> Result<()>,
{
    opts.validate()?;
    if state0.n_qubits() != h.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: h.n_qubits(),
            got: state0.n_qubits(),
        });
    }
    if !(t_max > 0.0) {
        return Err(invalid("t_max", "must be positive"));
    }
    let norm0 = state0.norm_sqr();
    if (norm0 - 1.0).abs() > 1e-10 {
        return Err(invalid(
            "state0",
            format!("not normalized (‖ψ‖² = {norm0})"),
        ));
    }
    let shift = h.expectation(state0)?;
    let k = opts.substeps_for(params, shift);
    let mut sys = Schrodinger {
        h,
        shift,
        scratch: vec![Complex64::zero(); h.dim()],
    };
    let mut rk = Rk8::new(sys.dim());
    let mut y: Vec<f64> = bytemuck::cast_slice(state0.amplitudes()).to_vec();
    let n_out = step_count(t_max, opts.dt);
    let mut t = 0.0;
    for i in 1..=n_out {
        let t_next = if i == n_out {
            t_max
        } else {
            i as f64 * opts.dt
        };
        let h_sub = (t_next - t) / k as f64;
        for s in 0..k {
            rk.step(&mut sys, t + s as f64 * h_sub, &mut y, h_sub)?;
        }
        t = t_next;
        let amps: &[Complex64] = bytemuck::cast_slice(&y);
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > opts.norm_tol {
            return Err(Error::Drift {
                quantity: "norm",
                t,
                drift: norm - 1.0,
                limit: opts.norm_tol,
            });
        }
        observer(t, amps, Complex64::from_polar(1.0, -shift * t))?;
    }
    let phase = Complex64::from_polar(1.0, -shift * t);
    let amps: Vec<Complex64> = bytemuck::cast_slice::<f64, Complex64>(&y)
        .iter()
        .map(|a| a * phase)
        .collect();
    PureState::new(state0.n_qubits(), amps)
}

/// Sampling of the thermal reduced-density run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    pub propagator: PropagatorOptions,
    pub t_max: f64,
    /// Output spacing; a positive multiple of `propagator.dt`.
    pub dt_out: f64,
}

impl ExactOptions {
    pub fn new(t_max: f64, dt: f64) -> Self {
        Self {
            propagator: PropagatorOptions::with_dt(dt),
            t_max,
            dt_out: dt,
        }
    }

    fn stride(&self) -> Result<usize> {
        let r = self.dt_out / self.propagator.dt;
        let n = r.round();
        if n < 1.0 || (r - n).abs() > 1e-9 * n {
            return Err(invalid("dt_out", "must be a positive multiple of dt"));
        }
        Ok(n as usize)
    }
}

/// Reduced density history of one trajectory `|1⟩ ⊗ |bath⟩`.
pub fn reduced_trajectory(
    bath_state: &[f64],
    params: &ModelParams,
    h: &SpinHamiltonian,
    opts: &ExactOptions,
) -> Result<ReducedTrajectory> {
    let stride = opts.stride()?;
    let psi0 = PureState::excited_product(
        &bath_state
            .iter()
            .map(|&a| Complex64::new(a, 0.0))
            .collect::<Vec<_>>(),
    )?;
    let n_out = step_count(opts.t_max, opts.propagator.dt);
    let mut traj = ReducedTrajectory::with_capacity(n_out / stride + 2);
    traj.push(0.0, reduce_amplitudes(psi0.amplitudes()));
    let mut step = 0usize;
    propagate_raw(
        &psi0,
        h,
        params,
        opts.t_max,
        &opts.propagator,
        |t, amps, _| {
            step += 1;
            if step.is_multiple_of(stride) || step == n_out {
                traj.push(t, reduce_amplitudes(amps));
            }
            Ok(())
        },
    )?;
    Ok(traj)
}

/// `ρ(t) = Σ_m p_m Tr_b |ψ_m(t)⟩⟨ψ_m(t)|` with `ψ_m(0) = |1⟩ ⊗ |m⟩`.
///
/// Trajectories run in parallel; the weighted sum is taken in ascending `m`
/// so the result does not depend on scheduling.
pub fn thermal_reduced_density(
    params: &ModelParams,
    bath: &BathEnsemble,
    opts: &ExactOptions,
) -> Result<ReducedTrajectory> {
    params.validate()?;
    if bath.eigvecs.first().map(Vec::len) != Some(1usize << params.n_s()) {
        return Err(invalid(
            "bath",
            "ensemble does not match the model's bath size",
        ));
    }
    let h = SpinHamiltonian::model(params);
    let per_m: Vec<ReducedTrajectory> = bath
        .eigvecs
        .par_iter()
        .map(|v| reduced_trajectory(v, params, &h, opts))
        .collect::<Result<_>>()?;

    let mut out = ReducedTrajectory::with_capacity(per_m[0].len());
    for (i, &t) in per_m[0].times.iter().enumerate() {
        let rho = per_m
            .iter()
            .zip(&bath.weights)
            .fold(DensityMatrix2::zero(), |acc, (traj, &p)| {
                acc.add(&traj.densities[i].scale(p))
            });
        out.push(t, rho);
    }
    Ok(out)
}

/// Bloch-vector solution for a lone spin under `ω₀/2 σz + β σx` from `|1⟩`.
pub fn two_level_free(omega0: f64, beta: f64, t: f64) -> DensityMatrix2 {
    let b = [2.0 * beta, 0.0, omega0];
    let norm = (b[0] * b[0] + b[2] * b[2]).sqrt();
    if norm == 0.0 {
        return DensityMatrix2::excited();
    }
    let n = [b[0] / norm, 0.0, b[2] / norm];
    let (sin, cos) = (norm * t).sin_cos();
    // r(t) = n(n·r0) + cos(|b|t)(r0 − n(n·r0)) + sin(|b|t)(n × r0), r0 = ẑ
    let par = n[2];
    let x = n[0] * par * (1.0 - cos);
    let y = -n[0] * sin;
    let z = n[2] * par + cos * (1.0 - n[2] * par);
    DensityMatrix2::new(
        (1.0 + z) / 2.0,
        (1.0 - z) / 2.0,
        Complex64::new(x / 2.0, -y / 2.0),
    )
}
