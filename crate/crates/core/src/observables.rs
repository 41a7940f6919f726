//! Entropy and spin-component expectations of the central-spin density.

use num_complex::Complex64;

/// 2×2 Hermitian density of the central spin in the `(|1⟩, |0⟩)` ordering.
///
/// `rho10 = ⟨1|ρ|0⟩`; `rho01` is its conjugate and is not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    pub rho11: f64,
    pub rho00: f64,
    pub rho10: Complex64,
}

impl DensityMatrix2 {
    pub fn new(rho11: f64, rho00: f64, rho10: Complex64) -> Self {
        Self {
            rho11,
            rho00,
            rho10,
        }
    }

    /// `|1⟩⟨1|`, the excited initial state.
    pub fn excited() -> Self {
        Self::new(1.0, 0.0, Complex64::new(0.0, 0.0))
    }

    pub fn maximally_mixed() -> Self {
        Self::new(0.5, 0.5, Complex64::new(0.0, 0.0))
    }

    /// From a general 2×2 matrix `[[m11, m10], [m01, m00]]`, Hermitian
    /// part only.
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Self {
        Self::new(m[0][0].re, m[1][1].re, (m[0][1] + m[1][0].conj()) * 0.5)
    }

    pub fn rho01(&self) -> Complex64 {
        self.rho10.conj()
    }

    /// `[[ρ11, ρ10], [ρ01, ρ00]]`.
    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.rho11, 0.0), self.rho10],
            [self.rho01(), Complex64::new(self.rho00, 0.0)],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho00
    }

    pub fn det(&self) -> f64 {
        self.rho11 * self.rho00 - self.rho10.norm_sqr()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho11 * self.rho11 + self.rho00 * self.rho00 + 2.0 * self.rho10.norm_sqr()
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * self.trace();
        let half_gap = (0.25 * (self.rho11 - self.rho00).powi(2) + self.rho10.norm_sqr()).sqrt();
        (mean - half_gap, mean + half_gap)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.rho11 * s, self.rho00 * s, self.rho10 * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.rho11 + other.rho11,
            self.rho00 + other.rho00,
            self.rho10 + other.rho10,
        )
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, Complex64::new(0.0, 0.0))
    }
}

/// Below this determinant the state is treated as pure.
const PURE_DET: f64 = 1e-15;
const DET_FLOOR: f64 = 1e-300;

/// Von Neumann entropy (natural log) from the determinant closed form.
pub fn entropy(rho: &DensityMatrix2) -> f64 {
    let d = rho.det();
    if d < PURE_DET {
        return 0.0;
    }
    let d = d.clamp(DET_FLOOR, 0.25);
    let s = (1.0 - 4.0 * d).max(0.0).sqrt();
    // −½{ln d + s ln[(1+s)/(1−s)]} with 1 − s = 4d/(1 + s) to avoid the
    // cancellation between the two logarithms near purity.
    let one_minus_s = 4.0 * d / (1.0 + s);
    let v = -0.5 * (one_minus_s * d.ln() + 2.0 * s * (0.5 * (1.0 + s)).ln());
    v.max(0.0)
}

/// `(X, Y, Z) = (ρ10 + ρ01, i(ρ10 − ρ01), ρ11 − ρ00)`.
pub fn spin_components(rho: &DensityMatrix2) -> (f64, f64, f64) {
    let x = 2.0 * rho.rho10.re;
    let y = -2.0 * rho.rho10.im;
    let z = rho.rho11 - rho.rho00;
    (x, y, z)
}

/// `S, X, Y, Z` for one density.
pub fn observables(rho: &DensityMatrix2) -> [f64; 4] {
    let (x, y, z) = spin_components(rho);
    [entropy(rho), x, y, z]
}

/// Reduced densities sampled on a uniform output grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReducedTrajectory {
    pub times: Vec<f64>,
    pub densities: Vec<DensityMatrix2>,
}

impl ReducedTrajectory {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            densities: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, t: f64, rho: DensityMatrix2) {
        self.times.push(t);
        self.densities.push(rho);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Rows of `[S, X, Y, Z]`.
    pub fn observables(&self) -> Vec<[f64; 4]> {
        self.densities.iter().map(observables).collect()
    }

    /// Values of one observable column (`0 = S, 1 = X, 2 = Y, 3 = Z`).
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.densities.iter().map(|r| observables(r)[k]).collect()
    }
}
