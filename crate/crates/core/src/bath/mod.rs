//! Bath frequencies, the isolated-bath eigenproblem, Boltzmann weights and
//! canonical averages of `Σx = Σ_k σx^(k)`.

mod lanczos;

pub use lanczos::{lowest_eigenpairs, Eigenpairs, LanczosOptions};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::spin::{log2_exact, ModelParams, SpinHamiltonian};

/// How bath frequencies are drawn from the Debye density `g(ω) ∝ ω²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyMode {
    /// Midpoint quantiles `ω_D ((j − ½)/n_s)^{1/3}`.
    Deterministic,
    /// Inverse-CDF samples from a ChaCha8 stream seeded with the value.
    Seeded(u64),
}

pub fn debye_frequencies(n_s: usize, omega_d: f64, mode: FrequencyMode) -> Result<Vec<f64>> {
    if n_s == 0 {
        return Err(invalid("n_s", "must be at least 1"));
    }
    if !(omega_d > 0.0) {
        return Err(invalid("omega_d", "must be positive"));
    }
    let mut omegas: Vec<f64> = match mode {
        FrequencyMode::Deterministic => (1..=n_s)
            .map(|j| omega_d * ((j as f64 - 0.5) / n_s as f64).cbrt())
            .collect(),
        FrequencyMode::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // 1 − U lies in (0, 1], so no frequency is exactly zero.
            (0..n_s)
                .map(|_| omega_d * (1.0 - rng.random::<f64>()).cbrt())
                .collect()
        }
    };
    omegas.sort_by(f64::total_cmp);
    Ok(omegas)
}

/// Normalized Boltzmann weights; energies are shifted by their minimum first.
pub fn boltzmann_weights(energies: &[f64], kt: f64) -> Vec<f64> {
    let e0 = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = energies.iter().map(|e| (-(e - e0) / kt).exp()).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// `out ← Σx x` on a bath register.
pub fn apply_sigma_x_total(x: &[f64], out: &mut [f64]) {
    let n = x.len().trailing_zeros() as usize;
    for (j, o) in out.iter_mut().enumerate() {
        *o = (0..n).map(|k| x[j ^ (1 << k)]).sum();
    }
}

/// Canonical `⟨Σx⟩` and `⟨Σx²⟩ − ⟨Σx⟩²` over a (possibly truncated) ensemble.
pub fn canonical_sigma_x_stats(eigvecs: &[Vec<f64>], weights: &[f64]) -> Result<(f64, f64)> {
    let Some(first) = eigvecs.first() else {
        return Err(invalid("eigvecs", "empty ensemble"));
    };
    log2_exact(first.len())?;
    let mut sx = vec![0.0; first.len()];
    let mut mean = 0.0;
    let mut second = 0.0;
    for (v, &p) in eigvecs.iter().zip(weights) {
        apply_sigma_x_total(v, &mut sx);
        let norm: f64 = v.iter().map(|a| a * a).sum();
        mean += p * v.iter().zip(&sx).map(|(a, b)| a * b).sum::<f64>() / norm;
        // ⟨v|Σx²|v⟩ = ‖Σx v‖²
        second += p * sx.iter().map(|a| a * a).sum::<f64>() / norm;
    }
    let total: f64 = weights.iter().take(eigvecs.len()).sum();
    mean /= total;
    second /= total;
    Ok((mean, second - mean * mean))
}

/// Lowest bath eigenpairs with their thermal weights and `Σx` statistics.
#[derive(Debug, Clone)]
pub struct BathEnsemble {
    pub energies: Vec<f64>,
    pub eigvecs: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub sigma_x_mean: f64,
    pub sigma_x_var: f64,
    pub residuals: Vec<f64>,
}

impl BathEnsemble {
    pub fn build(params: &ModelParams, opts: &LanczosOptions) -> Result<Self> {
        params.validate()?;
        let h = SpinHamiltonian::bath(params);
        let dim = h.dim();
        let mut scratch = vec![0.0; dim];
        let pairs = lowest_eigenpairs(
            |x, y| {
                h.apply_into(x, y, &mut scratch)
                    .expect("bath register dimensions are fixed")
            },
            dim,
            params.n_eig,
            opts,
        )?;
        Self::from_pairs(pairs.values, pairs.vectors, pairs.residuals, params.kt)
    }

    pub fn from_pairs(
        energies: Vec<f64>,
        eigvecs: Vec<Vec<f64>>,
        residuals: Vec<f64>,
        kt: f64,
    ) -> Result<Self> {
        let weights = boltzmann_weights(&energies, kt);
        let (sigma_x_mean, sigma_x_var) = canonical_sigma_x_stats(&eigvecs, &weights)?;
        Ok(Self {
            energies,
            eigvecs,
            weights,
            sigma_x_mean,
            sigma_x_var,
            residuals,
        })
    }

    pub fn n_eig(&self) -> usize {
        self.energies.len()
    }

    /// `β̃ = β + λ₀ ⟨Σx⟩` and `C = λ₀² Var(Σx)`.
    pub fn mean_field(&self, params: &ModelParams) -> MeanFieldCoupling {
        MeanFieldCoupling {
            beta_eff: params.beta + params.lambda0 * self.sigma_x_mean,
            c: params.lambda0 * params.lambda0 * self.sigma_x_var,
        }
    }
}

/// Bath-averaged coefficients entering the mean-field master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldCoupling {
    pub beta_eff: f64,
    pub c: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    #[test]
    fn deterministic_quantiles() {
        let w = debye_frequencies(1, 1.0, FrequencyMode::Deterministic).unwrap();
        assert!((w[0] - 0.5f64.cbrt()).abs() < 1e-15);
        assert!((w[0] - 0.79370).abs() < 1e-5);
        let w = debye_frequencies(2, 1.0, FrequencyMode::Deterministic).unwrap();
        assert!((w[0] - 0.62996).abs() < 1e-5 && (w[1] - 0.90856).abs() < 1e-5);
    }

    #[test]
    fn seeded_is_reproducible_and_in_range() {
        let a = debye_frequencies(14, 1.0, FrequencyMode::Seeded(42)).unwrap();
        let b = debye_frequencies(14, 1.0, FrequencyMode::Seeded(42)).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|p| p[0] <= p[1]));
        assert!(a.iter().all(|&w| w > 0.0 && w <= 1.0));
        assert_ne!(
            a,
            debye_frequencies(14, 1.0, FrequencyMode::Seeded(43)).unwrap()
        );
    }

    #[test]
    fn frequency_inputs_validated() {
        assert!(debye_frequencies(0, 1.0, FrequencyMode::Deterministic).is_err());
        assert!(debye_frequencies(3, 0.0, FrequencyMode::Deterministic).is_err());
    }

    #[test]
    fn boltzmann_examples() {
        let p = boltzmann_weights(&[0.0, 1.0, 2.0], 1e-12);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = boltzmann_weights(&[0.3; 4], 0.02);
        assert!(p.iter().all(|&x| (x - 0.25).abs() < 1e-15));
        let kt = 0.02;
        let p = boltzmann_weights(&[0.0, kt * 2f64.ln()], kt);
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-14 && (p[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn boltzmann_shift_invariant() {
        let e = [-3.0, -2.9, -2.5, -1.0];
        let a = boltzmann_weights(&e, 0.3);
        let shifted: Vec<f64> = e.iter().map(|x| x + 1e3).collect();
        let b = boltzmann_weights(&shifted, 0.3);
        for (x, y) in a.iter().zip(&b) {
            // Only the rounding of the shifted inputs differs.
            assert!((x - y).abs() < 1e-11);
        }
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_spin_ground_state_stats() {
        // |0⟩ of ω/2 σz: ⟨σx⟩ = 0, ⟨σx²⟩ = 1.
        let (m, v) = canonical_sigma_x_stats(&[vec![1.0, 0.0]], &[1.0]).unwrap();
        assert_eq!((m, v), (0.0, 1.0));
    }

    fn dense_bath(params: &ModelParams) -> DMatrix<f64> {
        let h = SpinHamiltonian::bath(params);
        let dim = h.dim();
        let mut scratch = vec![0.0; dim];
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        let mut col = vec![0.0; dim];
        for j in 0..dim {
            e.fill(0.0);
            e[j] = 1.0;
            h.apply_into(&e, &mut col, &mut scratch).unwrap();
            for i in 0..dim {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    fn params(omegas: Vec<f64>, beta: f64, lambda: f64, n_eig: usize) -> ModelParams {
        ModelParams {
            beta,
            lambda,
            n_eig,
            ..ModelParams::standard(lambda, omegas)
        }
    }

    #[test]
    fn lanczos_matches_dense_for_three_spins() {
        let p = params(vec![0.5, 0.7, 0.9], 0.01, 2.0, 8);
        let ens = BathEnsemble::build(&p, &LanczosOptions::default()).unwrap();
        let mut exact: Vec<f64> = SymmetricEigen::new(dense_bath(&p))
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        exact.sort_by(f64::total_cmp);
        for (a, b) in ens.energies.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        for i in 0..8 {
            for j in 0..8 {
                let g: f64 = ens.eigvecs[i]
                    .iter()
                    .zip(&ens.eigvecs[j])
                    .map(|(a, b)| a * b)
                    .sum();
                assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_bath_ground_energy() {
        let p = params(vec![0.4, 0.6, 0.75, 0.9], 0.0, 0.0, 3);
        let ens = BathEnsemble::build(&p, &LanczosOptions::default()).unwrap();
        let ground = -0.5 * (0.4 + 0.6 + 0.75 + 0.9);
        assert!((ens.energies[0] - ground).abs() < 1e-12);
        // Next levels flip the softest spins: +0.4, +0.6.
        assert!((ens.energies[1] - (ground + 0.4)).abs() < 1e-12);
        assert!((ens.energies[2] - (ground + 0.6)).abs() < 1e-12);
    }

    #[test]
    fn two_spin_ground_energy_matches_dense() {
        let p = params(vec![0.5, 0.8], 0.01, 2.0, 1);
        let ens = BathEnsemble::build(&p, &LanczosOptions::default()).unwrap();
        let exact = SymmetricEigen::new(dense_bath(&p)).eigenvalues.min();
        assert!((ens.energies[0] - exact).abs() < 1e-12);
    }

    fn dense_stats(p: &ModelParams) -> (f64, f64) {
        let h = dense_bath(p);
        let dim = h.nrows();
        let eig = SymmetricEigen::new(h);
        let weights = boltzmann_weights(eig.eigenvalues.as_slice(), p.kt);
        let b = &eig.eigenvectors
            * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(weights))
            * eig.eigenvectors.transpose();
        let mut sx = DMatrix::zeros(dim, dim);
        let n = p.n_s();
        for j in 0..dim {
            for k in 0..n {
                sx[(j ^ (1 << k), j)] += 1.0;
            }
        }
        let mean = (&sx * &b).trace();
        let second = (&sx * &sx * &b).trace();
        (mean, second - mean * mean)
    }

    #[test]
    fn full_ensemble_stats_match_dense_trace() {
        for (omegas, n_eig) in [(vec![0.5, 0.8], 4), (vec![0.3, 0.5, 0.8, 0.95], 16)] {
            let mut p = params(omegas, 0.01, 2.0, n_eig);
            p.kt = 0.7;
            let ens = BathEnsemble::build(&p, &LanczosOptions::default()).unwrap();
            let (m, v) = dense_stats(&p);
            assert!(
                (ens.sigma_x_mean - m).abs() < 1e-12,
                "{} vs {m}",
                ens.sigma_x_mean
            );
            assert!((ens.sigma_x_var - v).abs() < 1e-12);
            assert!(ens.sigma_x_var >= 0.0);
        }
    }
}
