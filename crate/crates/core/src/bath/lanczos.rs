//! Thick-restart Lanczos for the lowest eigenpairs of a real symmetric
//! operator given only through its action.
//!
//! Every new Krylov vector is orthogonalized against the whole basis twice
//! (classical Gram–Schmidt with one refinement pass), and the projected
//! matrix is formed from those projections rather than assumed
//! tridiagonal. At a restart the lowest Ritz vectors are kept together with
//! the current residual direction, which preserves the Krylov relation
//! `H V = V T + r eᵀ`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Residual tolerance `‖Hv − εv‖` for every returned pair.
    pub tol: f64,
    /// Budget of operator applications; `None` means `500·n_eig`.
    pub max_matvecs: Option<usize>,
    /// Seed of the start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_matvecs: None,
            seed: 0x1a2c_205e,
        }
    }
}

/// Lowest eigenpairs, ascending in energy.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub matvecs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes the components of `w` along `basis`, returning the coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _pass in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let p = dot(v, w);
            *c += p;
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= p * vi;
            }
        }
    }
    coeffs
}

fn random_unit_orthogonal(rng: &mut ChaCha8Rng, basis: &[Vec<f64>], dim: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
        orthogonalize(basis, &mut v);
        let n = norm(&v);
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            return v;
        }
    }
}

/// Lowest `n_eig` eigenpairs of the symmetric operator `apply` of size `dim`.
pub fn lowest_eigenpairs<F>(
    mut apply: F,
    dim: usize,
    n_eig: usize,
    opts: &LanczosOptions,
) -> Result<Eigenpairs>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if n_eig == 0 || n_eig > dim {
        return Err(invalid("n_eig", format!("{n_eig} not in [1, {dim}]")));
    }
    let budget = opts
        .max_matvecs
        .unwrap_or(500 * n_eig)
        .max(dim.min(n_eig + 1));
    let m_max = dim.min((2 * n_eig + 20).max(n_eig + 40));
    let keep = (n_eig + (m_max - n_eig) / 2)
        .min(m_max.saturating_sub(1))
        .max(n_eig.min(m_max - 1));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = vec![random_unit_orthogonal(&mut rng, &[], dim)];
    let mut t = DMatrix::<f64>::zeros(m_max, m_max);
    let mut done = 0usize; // columns of `t` already filled
    let mut w = vec![0.0; dim];
    let mut matvecs = 0usize;
    let mut scale = 0.0f64;

    loop {
        let mut residual = vec![0.0; dim];
        let mut beta = 0.0;
        for j in done..m_max {
            apply(&basis[j], &mut w);
            matvecs += 1;
            let coeffs = orthogonalize(&basis, &mut w);
            for (i, c) in coeffs.iter().enumerate() {
                t[(i, j)] = *c;
                t[(j, i)] = *c;
                scale = scale.max(c.abs());
            }
            beta = norm(&w);
            let broken = beta <= 1e-12 * scale.max(1.0);
            if j + 1 < m_max {
                let next = if broken {
                    random_unit_orthogonal(&mut rng, &basis, dim)
                } else {
                    w.iter().map(|x| x / beta).collect()
                };
                basis.push(next);
            } else if broken {
                beta = 0.0;
            } else {
                residual.iter_mut().zip(&w).for_each(|(r, x)| *r = x / beta);
            }
        }

        let eig = SymmetricEigen::new(t.clone());
        let mut order: Vec<usize> = (0..m_max).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let estimates: Vec<f64> = order[..n_eig]
            .iter()
            .map(|&k| (beta * eig.eigenvectors[(m_max - 1, k)]).abs())
            .collect();
        let mut worst = estimates.iter().cloned().fold(0.0, f64::max);

        let ritz = |k: usize| -> Vec<f64> {
            let mut y = vec![0.0; dim];
            for (i, v) in basis.iter().enumerate() {
                let s = eig.eigenvectors[(i, k)];
                y.iter_mut().zip(v).for_each(|(yi, vi)| *yi += s * vi);
            }
            y
        };

        if worst <= opts.tol || m_max == dim {
            let mut values = Vec::with_capacity(n_eig);
            let mut vectors = Vec::with_capacity(n_eig);
            let mut residuals = Vec::with_capacity(n_eig);
            for &k in &order[..n_eig] {
                let theta = eig.eigenvalues[k];
                let mut y = ritz(k);
                let n = norm(&y);
                y.iter_mut().for_each(|x| *x /= n);
                apply(&y, &mut w);
                matvecs += 1;
                let r = w
                    .iter()
                    .zip(&y)
                    .map(|(a, b)| (a - theta * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                values.push(theta);
                vectors.push(y);
                residuals.push(r);
            }
            let explicit = residuals.iter().cloned().fold(0.0, f64::max);
            if explicit <= opts.tol {
                return Ok(Eigenpairs {
                    values,
                    vectors,
                    residuals,
                    matvecs,
                });
            }
            worst = explicit;
            if m_max == dim || matvecs >= budget {
                return Err(Error::NoConvergence {
                    iterations: matvecs,
                    worst_residual: worst,
                    tol: opts.tol,
                    residuals,
                });
            }
        }
        if matvecs >= budget {
            return Err(Error::NoConvergence {
                iterations: matvecs,
                worst_residual: worst,
                tol: opts.tol,
                residuals: estimates,
            });
        }

        // Thick restart: lowest `keep` Ritz vectors plus the residual direction.
        let mut new_basis: Vec<Vec<f64>> = order[..keep].iter().map(|&k| ritz(k)).collect();
        for i in 0..keep {
            // Re-orthonormalize against rounding drift.
            let (head, tail) = new_basis.split_at_mut(i);
            orthogonalize(head, &mut tail[0]);
            let n = norm(&tail[0]);
            tail[0].iter_mut().for_each(|x| *x /= n);
        }
        t.fill(0.0);
        for (i, &k) in order[..keep].iter().enumerate() {
            t[(i, i)] = eig.eigenvalues[k];
        }
        let mut r = if beta == 0.0 {
            random_unit_orthogonal(&mut rng, &new_basis, dim)
        } else {
            residual
        };
        orthogonalize(&new_basis, &mut r);
        let n = norm(&r);
        r.iter_mut().for_each(|x| *x /= n);
        new_basis.push(r);
        basis = new_basis;
        done = keep;
    }
}
