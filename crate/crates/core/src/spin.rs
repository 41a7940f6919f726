//! Bitstring-basis state vectors and matrix-free Pauli / Hamiltonian action.
//!
//! Basis index convention for an `n_s`-spin bath plus the central spin:
//! bath spin `j` (1-based) occupies bit `j - 1`, the central spin occupies
//! bit `n_s` (the most significant bit). A set bit is the spin-up state
//! `|1⟩`, the `+1` eigenstate of `σz`.
//!
//! The Hamiltonian is never stored. Its two-body bath coupling is applied
//! through `Σ_{i≠j} σx^(i) σx^(j) = (Σx)² − n_s`, so one application costs
//! two sweeps over `n_s` bit flips instead of `n_s²`.

use std::ops::{Add, AddAssign, Mul};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{invalid, Error, Result};
use crate::observables::DensityMatrix2;

/// Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Complex amplitude vector over the `2^n_qubits` bitstring basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits >= usize::BITS as usize {
            return Err(invalid(
                "n_qubits",
                format!("{n_qubits} is not a usable register size"),
            ));
        }
        let dim = 1usize << n_qubits;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amps.len(),
            });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn zeros(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            amps: vec![Complex64::zero(); 1 << n_qubits],
        }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zeros(n_qubits);
        if index >= s.dim() {
            return Err(Error::DimensionMismatch {
                expected: s.dim(),
                got: index,
            });
        }
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// `|1⟩ ⊗ |bath⟩`: central spin up, bath amplitudes in the lower block.
    pub fn excited_product(bath: &[Complex64]) -> Result<Self> {
        let n_s = log2_exact(bath.len())?;
        let mut s = Self::zeros(n_s + 1);
        s.amps[bath.len()..].copy_from_slice(bath);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

pub(crate) fn log2_exact(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(invalid(
            "dimension",
            format!("{len} is not a power of two ≥ 2"),
        ));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Returns `σ_axis^(k) |ψ⟩`.
pub fn apply_sigma(state: &PureState, axis: Axis, k: usize) -> Result<PureState> {
    let mut out = PureState::zeros(state.n_qubits);
    apply_sigma_into(state.amplitudes(), out.amplitudes_mut(), axis, k)?;
    Ok(out)
}

/// Buffer form of [`apply_sigma`]; `out` is overwritten.
pub fn apply_sigma_into(
    input: &[Complex64],
    out: &mut [Complex64],
    axis: Axis,
    k: usize,
) -> Result<()> {
    let n_qubits = log2_exact(input.len())?;
    if k >= n_qubits {
        return Err(Error::QubitOutOfRange { index: k, n_qubits });
    }
    if out.len() != input.len() {
        return Err(Error::DimensionMismatch {
            expected: input.len(),
            got: out.len(),
        });
    }
    let mask = 1usize << k;
    let i = Complex64::i();
    for (j, o) in out.iter_mut().enumerate() {
        let up = j & mask != 0;
        *o = match axis {
            Axis::X => input[j ^ mask],
            // σy|1⟩ = i|0⟩, σy|0⟩ = −i|1⟩
            Axis::Y if up => -i * input[j ^ mask],
            Axis::Y => i * input[j ^ mask],
            Axis::Z if up => input[j],
            Axis::Z => -input[j],
        };
    }
    Ok(())
}

/// Parameters of the central-spin / spin-bath model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub omega0: f64,
    pub beta: f64,
    pub lambda0: f64,
    pub lambda: f64,
    /// Bath frequencies; `n_s` is their count.
    pub omegas: Vec<f64>,
    pub kt: f64,
    pub n_eig: usize,
    /// Frequency cutoff the `omegas` must respect.
    pub omega_d: f64,
}

impl ModelParams {
    /// Default model constants (ω₀ = 0.8288, β = 0.01, λ₀ = 1, kT = 0.02,
    /// n_eig = 20, ω_D = 1) with the given λ and bath frequencies.
    pub fn standard(lambda: f64, omegas: Vec<f64>) -> Self {
        Self {
            omega0: 0.8288,
            beta: 0.01,
            lambda0: 1.0,
            lambda,
            omegas,
            kt: 0.02,
            n_eig: 20,
            omega_d: 1.0,
        }
    }

    pub fn n_s(&self) -> usize {
        self.omegas.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n_s = self.n_s();
        if n_s == 0 {
            return Err(invalid("n_s", "must be at least 1"));
        }
        if n_s > 30 {
            return Err(invalid(
                "n_s",
                format!("{n_s} bath spins exceed the supported register"),
            ));
        }
        if !(self.omega_d > 0.0) {
            return Err(invalid("omega_d", "must be positive"));
        }
        if let Some(w) = self
            .omegas
            .iter()
            .find(|&&w| !(w > 0.0 && w <= self.omega_d))
        {
            return Err(invalid(
                "omegas",
                format!("frequency {w} outside (0, {}]", self.omega_d),
            ));
        }
        if !(self.kt > 0.0) {
            return Err(invalid("kT", "must be positive"));
        }
        if self.n_eig == 0 || self.n_eig > 1usize << n_s {
            return Err(invalid(
                "n_eig",
                format!("must lie in [1, 2^n_s = {}]", 1usize << n_s),
            ));
        }
        for (name, v) in [
            ("omega0", self.omega0),
            ("beta", self.beta),
            ("lambda0", self.lambda0),
            ("lambda", self.lambda),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// Interval guaranteed to contain the spectrum of the full Hamiltonian.
    ///
    /// Weyl bound: the sum of the exact spectral intervals of the individual terms.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let n = self.n_s() as f64;
        let mut half = (self.omega0 * self.omega0 / 4.0 + self.beta * self.beta).sqrt();
        half += self
            .omegas
            .iter()
            .map(|w| (w * w / 4.0 + self.beta * self.beta).sqrt())
            .sum::<f64>();
        half += self.lambda0.abs() * n;
        let (lo, hi) = self.pair_coupling_range();
        (lo - half, hi + half)
    }

    /// Exact spectral range of `λ/2 ((Σx)² − n_s)`.
    fn pair_coupling_range(&self) -> (f64, f64) {
        let n = self.n_s();
        let s_min = (n % 2) as f64;
        let n = n as f64;
        let a = self.lambda / 2.0 * (s_min * s_min - n);
        let b = self.lambda / 2.0 * (n * n - n);
        (a.min(b), a.max(b))
    }
}

/// Scalar types the matrix-free kernels run on.
pub trait Amplitude:
    Copy
    + Zero
    + Add<Output = Self>
    + AddAssign
    + Mul<f64, Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
{
    fn one() -> Self;
}

impl Amplitude for f64 {
    fn one() -> Self {
        1.0
    }
}

impl Amplitude for Complex64 {
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
}

/// Precomputed matrix-free form of the model (or bath-only) Hamiltonian.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    n_bath: usize,
    with_system: bool,
    /// σz terms plus the constant −λ n_s / 2, per basis index.
    diag: Vec<f64>,
    beta: f64,
    lambda0: f64,
    half_lambda: f64,
}

impl SpinHamiltonian {
    /// Full system + bath Hamiltonian on `n_s + 1` qubits.
    pub fn model(params: &ModelParams) -> Self {
        Self::build(params, true)
    }

    /// Isolated bath: the single-spin and pair-coupling bath terms only.
    pub fn bath(params: &ModelParams) -> Self {
        Self::build(params, false)
    }

    fn build(params: &ModelParams, with_system: bool) -> Self {
        let n_bath = params.n_s();
        let n_qubits = n_bath + with_system as usize;
        let shift = -params.lambda * n_bath as f64 / 2.0;
        let diag = (0..1usize << n_qubits)
            .map(|j| {
                let mut e = shift;
                for (k, w) in params.omegas.iter().enumerate() {
                    e += if j >> k & 1 == 1 { w / 2.0 } else { -w / 2.0 };
                }
                if with_system {
                    let half = params.omega0 / 2.0;
                    e += if j >> n_bath & 1 == 1 { half } else { -half };
                }
                e
            })
            .collect();
        Self {
            n_bath,
            with_system,
            diag,
            beta: params.beta,
            lambda0: params.lambda0,
            half_lambda: params.lambda / 2.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_bath + self.with_system as usize
    }

    /// Diagonal (σz) part, including the constant from the pair coupling.
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    fn check<T>(&self, x: &[T], y: &[T], scratch: &[T]) -> Result<()> {
        for len in [x.len(), y.len(), scratch.len()] {
            if len != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    got: len,
                });
            }
        }
        Ok(())
    }

    /// `y ← y + coef · H x`. `scratch` receives `Σx x` and must not alias.
    pub fn accumulate<T: Amplitude>(
        &self,
        x: &[T],
        y: &mut [T],
        scratch: &mut [T],
        coef: T,
    ) -> Result<()> {
        self.check(x, y, scratch)?;
        let nb = self.n_bath;
        for (j, w) in scratch.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in 0..nb {
                acc += x[j ^ (1 << k)];
            }
            *w = acc;
        }
        let w = &*scratch;
        let sys = 1usize << nb;
        for (j, yj) in y.iter_mut().enumerate() {
            let mut pair = T::zero();
            for k in 0..nb {
                pair += w[j ^ (1 << k)];
            }
            let mut h = x[j] * self.diag[j] + w[j] * self.beta + pair * self.half_lambda;
            if self.with_system {
                h += x[j ^ sys] * self.beta + w[j ^ sys] * self.lambda0;
            }
            *yj += coef * h;
        }
        Ok(())
    }

    /// `y ← H x`.
    pub fn apply_into<T: Amplitude>(&self, x: &[T], y: &mut [T], scratch: &mut [T]) -> Result<()> {
        y.iter_mut().for_each(|v| *v = T::zero());
        self.accumulate(x, y, scratch, T::one())
    }

    pub fn expectation(&self, state: &PureState) -> Result<f64> {
        let mut hx = vec![Complex64::zero(); self.dim()];
        let mut scratch = hx.clone();
        self.apply_into(state.amplitudes(), &mut hx, &mut scratch)?;
        Ok(state
            .amplitudes()
            .iter()
            .zip(&hx)
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }
}

/// Returns `H|ψ⟩` for the full model Hamiltonian.
pub fn apply_hamiltonian(state: &PureState, params: &ModelParams) -> Result<PureState> {
    let h = SpinHamiltonian::model(params);
    apply_with(&h, state)
}

/// Returns `H_b|ψ⟩` for the isolated bath (state on `n_s` qubits).
pub fn apply_bath_hamiltonian(state: &PureState, params: &ModelParams) -> Result<PureState> {
    let h = SpinHamiltonian::bath(params);
    apply_with(&h, state)
}

fn apply_with(h: &SpinHamiltonian, state: &PureState) -> Result<PureState> {
    if state.n_qubits() != h.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: h.n_qubits(),
            got: state.n_qubits(),
        });
    }
    let mut out = PureState::zeros(state.n_qubits());
    let mut scratch = vec![Complex64::zero(); state.dim()];
    h.apply_into(state.amplitudes(), out.amplitudes_mut(), &mut scratch)?;
    Ok(out)
}

/// Reduced density of the central spin (most significant qubit).
pub fn partial_trace_system(state: &PureState) -> Result<DensityMatrix2> {
    if state.n_qubits() < 2 {
        return Err(invalid(
            "n_qubits",
            "partial trace needs at least one bath qubit",
        ));
    }
    Ok(reduce_amplitudes(state.amplitudes()))
}

pub(crate) fn reduce_amplitudes(amps: &[Complex64]) -> DensityMatrix2 {
    let half = amps.len() / 2;
    let (down, up) = amps.split_at(half);
    let mut r11 = 0.0;
    let mut r00 = 0.0;
    let mut r10 = Complex64::zero();
    for (d, u) in down.iter().zip(up) {
        r11 += u.norm_sqr();
        r00 += d.norm_sqr();
        r10 += u * d.conj();
    }
    DensityMatrix2::new(r11, r00, r10)
}
