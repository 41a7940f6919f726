//! Dense reference constructions shared by unit tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spin::{Axis, ModelParams, PureState};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2×2 Pauli matrix indexed by bit value `[out][in]`.
pub fn pauli(axis: Axis) -> [[Complex64; 2]; 2] {
    match axis {
        Axis::X => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
        Axis::Y => [[c(0., 0.), c(0., 1.)], [c(0., -1.), c(0., 0.)]],
        Axis::Z => [[c(-1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]],
    }
}

/// Dense `σ_axis^(k)` on `n` qubits.
pub fn sigma(axis: Axis, k: usize, n: usize) -> CMat {
    let p = pauli(axis);
    let dim = 1 << n;
    CMat::from_fn(dim, dim, |i, j| {
        if (i ^ j) & !(1usize << k) != 0 {
            c(0., 0.)
        } else {
            p[i >> k & 1][j >> k & 1]
        }
    })
}

pub fn dense_model(p: &ModelParams, with_system: bool) -> CMat {
    let nb = p.n_s();
    let n = nb + with_system as usize;
    let dim = 1 << n;
    let mut h = CMat::zeros(dim, dim);
    if with_system {
        h += sigma(Axis::Z, nb, n) * c(p.omega0 / 2.0, 0.) + sigma(Axis::X, nb, n) * c(p.beta, 0.);
        for j in 0..nb {
            h += sigma(Axis::X, nb, n) * sigma(Axis::X, j, n) * c(p.lambda0, 0.);
        }
    }
    for j in 0..nb {
        h += sigma(Axis::Z, j, n) * c(p.omegas[j] / 2.0, 0.) + sigma(Axis::X, j, n) * c(p.beta, 0.);
        for i in 0..nb {
            if i != j {
                h += sigma(Axis::X, i, n) * sigma(Axis::X, j, n) * c(p.lambda / 2.0, 0.);
            }
        }
    }
    h
}

pub fn random_state(n: usize, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    PureState::new(n, amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

pub fn to_vec(s: &PureState) -> DVector<Complex64> {
    DVector::from_column_slice(s.amplitudes())
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
