//! Memory-kernel moments and the memory function.
//!
//! The interaction part of the projected Liouvillian, `A = QLQ` with
//! `L = [H, ·]` and `Pχ = Tr_b χ ⊗ B`, enters the mean-field equations only
//! through two normalized moments, `⟨AA†⟩` and `⟨AA⟩`. They are evaluated
//! here from traces over a finite product basis; a dense superoperator
//! construction serves as the reference.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::bath::{apply_sigma_x_total, boltzmann_weights, BathEnsemble};
use crate::error::{invalid, Error, Result};
use crate::spin::ModelParams;

type CMat = DMatrix<Complex64>;

/// Moments of `A` and the derived memory-function rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// `⟨AA†⟩`.
    pub aad: f64,
    /// `⟨AA⟩`.
    pub aa: f64,
    pub p: f64,
    pub q: f64,
}

impl KernelParams {
    /// Derives `p = (aad − aa)/√aad` and `q = (aad + aa)/√aad`.
    ///
    /// Fails when `aad ≤ 0` or `|aa| > aad`; such inputs would give
    /// negative rates and are reported rather than clamped.
    pub fn from_moments(aad: f64, aa: f64) -> Result<Self> {
        if !(aad > 0.0) || !aa.is_finite() {
            return Err(invalid("aad", format!("must be positive (got {aad:e})")));
        }
        // one ulp of slack for aa = ±aad up to rounding
        let slack = 4.0 * f64::EPSILON * aad;
        if aa.abs() > aad + slack {
            return Err(invalid(
                "aa",
                format!("|aa| = {:e} exceeds aad = {aad:e}", aa.abs()),
            ));
        }
        let root = aad.sqrt();
        Ok(Self {
            aad,
            aa,
            p: ((aad - aa) / root).max(0.0),
            q: ((aad + aa) / root).max(0.0),
        })
    }

    /// Rates given directly; used for the static kernel `W ≡ 1` (`p = q = 0`).
    pub fn from_rates(p: f64, q: f64) -> Result<Self> {
        if !(p >= 0.0 && q >= 0.0 && p.is_finite() && q.is_finite()) {
            return Err(invalid("p, q", "must be finite and nonnegative"));
        }
        let aad = ((p + q) / 2.0).powi(2);
        Ok(Self {
            aad,
            aa: (q - p) / 2.0 * aad.sqrt(),
            p,
            q,
        })
    }

    pub fn memory(&self, t: f64) -> f64 {
        memory_function(self, t)
    }
}

/// `W(t) = [1 − 4/(3π)(pt) + (pt)²/8 − 4/(45π)(pt)³ + (pt)⁴/48] e^{−(qt)²/8}`
/// evaluated at `|t|`.
pub fn memory_function(k: &KernelParams, t: f64) -> f64 {
    let t = t.abs();
    let expo = -(k.q * t).powi(2) / 8.0;
    if expo < -700.0 {
        return 0.0;
    }
    let x = k.p * t;
    let poly =
        1.0 + x * (-4.0 / (3.0 * PI) + x * (1.0 / 8.0 + x * (-4.0 / (45.0 * PI) + x / 48.0)));
    poly * expo.exp()
}

/// Half-widths `(p, q)` of the elliptic spectral support of `A`: `p` along
/// the decay-rate (imaginary) axis, `q` along the frequency (real) axis.
pub fn ellipse_semiaxes(k: &KernelParams) -> Result<(f64, f64)> {
    if !(k.aad > 0.0) {
        return Err(invalid("aad", "must be positive"));
    }
    let root = k.aad.sqrt();
    Ok(((k.aad - k.aa) / root, (k.aad + k.aa) / root))
}

/// Hamiltonian and bath density in a finite product basis, system index
/// major: basis function `s·m_b + m` is system bit `s` with bath state `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteBasisOperators {
    pub h: CMat,
    /// Bath density on the `m_b`-dimensional factor.
    pub b: CMat,
    pub m_s: usize,
    pub m_b: usize,
}

impl FiniteBasisOperators {
    pub fn new(h: CMat, b: CMat, m_s: usize) -> Result<Self> {
        let m_b = b.nrows();
        if b.ncols() != m_b {
            return Err(Error::DimensionMismatch {
                expected: m_b,
                got: b.ncols(),
            });
        }
        if m_s == 0 || m_b == 0 {
            return Err(invalid("m_s, m_b", "must be positive"));
        }
        if h.nrows() != m_s * m_b || h.ncols() != m_s * m_b {
            return Err(Error::DimensionMismatch {
                expected: m_s * m_b,
                got: h.nrows(),
            });
        }
        Ok(Self { h, b, m_s, m_b })
    }

    fn dim(&self) -> usize {
        self.m_s * self.m_b
    }

    /// `I_s ⊗ B`.
    fn b_full(&self) -> CMat {
        let mut out = CMat::zeros(self.dim(), self.dim());
        for s in 0..self.m_s {
            out.view_mut((s * self.m_b, s * self.m_b), (self.m_b, self.m_b))
                .copy_from(&self.b);
        }
        out
    }

    /// `tr_b X`, an `m_s × m_s` matrix.
    fn tr_b(&self, x: &CMat) -> CMat {
        let mb = self.m_b;
        CMat::from_fn(self.m_s, self.m_s, |a, c| {
            (0..mb).map(|j| x[(a * mb + j, c * mb + j)]).sum()
        })
    }

    /// `tr_s X`, an `m_b × m_b` matrix.
    fn tr_s(&self, x: &CMat) -> CMat {
        let mb = self.m_b;
        CMat::from_fn(mb, mb, |p, q| {
            (0..self.m_s).map(|i| x[(i * mb + p, i * mb + q)]).sum()
        })
    }

    /// `Pχ = tr_b χ ⊗ B`.
    fn project(&self, x: &CMat) -> CMat {
        self.tr_b(x).kronecker(&self.b)
    }
}

/// `diag(p_1, …, p_{m_b})` from the `m_b` lowest bath energies.
pub fn canonical_bath_density(energies: &[f64], kt: f64, m_b: usize) -> Result<CMat> {
    if m_b == 0 || m_b > energies.len() {
        return Err(invalid("m_b", format!("must be in 1..={}", energies.len())));
    }
    let w = boltzmann_weights(&energies[..m_b], kt);
    Ok(CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        m_b,
        w.into_iter().map(|p| Complex64::new(p, 0.0)),
    )))
}

/// Model Hamiltonian restricted to `{|0⟩, |1⟩} ⊗ {m_b lowest bath states}`.
pub fn assemble_finite_h(
    params: &ModelParams,
    bath: &BathEnsemble,
    m_b: usize,
) -> Result<FiniteBasisOperators> {
    if m_b == 0 || m_b > bath.n_eig() {
        return Err(Error::DimensionMismatch {
            expected: bath.n_eig(),
            got: m_b,
        });
    }
    let dim = bath.eigvecs[0].len();
    let mut sx = vec![0.0; dim];
    let mut m = DMatrix::<f64>::zeros(m_b, m_b);
    for j in 0..m_b {
        apply_sigma_x_total(&bath.eigvecs[j], &mut sx);
        for i in 0..m_b {
            m[(i, j)] = bath.eigvecs[i].iter().zip(&sx).map(|(a, b)| a * b).sum();
        }
    }
    let m = (&m + m.transpose()) * 0.5;

    let n = 2 * m_b;
    let mut h = CMat::zeros(n, n);
    for s in 0..2 {
        let sz = if s == 1 { 1.0 } else { -1.0 };
        for a in 0..m_b {
            h[(s * m_b + a, s * m_b + a)] =
                Complex64::new(sz * params.omega0 / 2.0 + bath.energies[a], 0.0);
            // β σx on the system with the bath untouched
            h[(s * m_b + a, (1 - s) * m_b + a)] += Complex64::new(params.beta, 0.0);
        }
        for a in 0..m_b {
            for c in 0..m_b {
                h[(s * m_b + a, (1 - s) * m_b + c)] +=
                    Complex64::new(params.lambda0 * m[(a, c)], 0.0);
            }
        }
    }
    let b = canonical_bath_density(&bath.energies, params.kt, m_b)?;
    FiniteBasisOperators::new(h, b, 2)
}

fn tr(x: &CMat) -> Complex64 {
    x.trace()
}

/// `(⟨AA†⟩, ⟨AA⟩)` from finite-basis trace formulas.
pub fn moments_closed_form(ops: &FiniteBasisOperators) -> (f64, f64) {
    let (ms, mb) = (ops.m_s as f64, ops.m_b as f64);
    let h = &ops.h;
    let bf = ops.b_full();
    let b = &ops.b;

    let h2 = h * h;
    let hb = h * &bf;
    let hb2 = &hb * &bf;
    let h2b = &h2 * &bf;
    let h2b2 = &h2b * &bf;
    let tr_b2 = tr(&(b * b));
    let tr_h = tr(h);
    let tr_h2 = tr(&h2);
    let tr_hb = tr(&hb);
    let tr_hb2 = tr(&hb2);
    let trs_h = ops.tr_s(h);
    let trb_h = ops.tr_b(h);
    let trb_hb = ops.tr_b(&hb);
    let trb_hb2 = ops.tr_b(&hb2);
    let trs_hb = ops.tr_s(&hb);
    let trs_h_sq = &trs_h * &trs_h;
    let trb_hb_sq = tr(&(&trb_hb * &trb_hb));

    let aad = 2.0 * ms * mb * tr_h2 - 2.0 * tr_h * tr_h - 8.0 * ms * tr(&h2b) - 4.0 * tr_hb * tr_hb
        + 2.0 * ms * mb * tr(&h2b2)
        + 2.0 * ms * tr_h2 * tr_b2
        + 4.0 * mb * tr_hb * tr_hb2
        + 8.0 * tr(&(&trs_h_sq * b))
        + 4.0 * ms * trb_hb_sq
        + 4.0 * ms * tr(&(&trb_hb2 * &trb_h))
        - 4.0 * tr_h * tr_hb2
        - 2.0 * mb * tr(&(&trs_hb * &trs_hb))
        - 2.0 * tr(&trs_h_sq) * tr_b2
        - 4.0 * ms * mb * tr(&(&trb_hb * &trb_hb2))
        - 4.0 * ms * tr(&(&trb_h * &trb_hb)) * tr_b2
        + 2.0 * ms * mb * trb_hb_sq * tr_b2
        - 2.0 * mb * tr_hb * tr_hb * tr_b2
        + 4.0 * tr_h * tr_hb * tr_b2;
    let aa = 2.0 * ms * mb * tr_h2 - 2.0 * tr_h * tr_h
        + 4.0 * tr(&(&trs_h_sq * b))
        + 2.0 * ms * trb_hb_sq
        - 4.0 * ms * tr(&h2b)
        - 2.0 * tr_hb * tr_hb;
    let norm = ms * ms * mb * mb;
    (aad.re / norm, aa.re / norm)
}

/// Largest Liouville dimension the dense reference accepts.
pub const BRUTE_FORCE_LIMIT: usize = 4096;

/// Dense `A = QLQ` on row-major vectorized operators.
pub fn projected_liouvillian(ops: &FiniteBasisOperators) -> Result<CMat> {
    let n = ops.dim();
    let big = n * n;
    if big > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            dim: big,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let q = |x: &CMat| x - ops.project(x);
    let mut a = CMat::zeros(big, big);
    for k in 0..big {
        let mut e = CMat::zeros(n, n);
        e[(k / n, k % n)] = Complex64::new(1.0, 0.0);
        let x = q(&e);
        let y = q(&(&ops.h * &x - &x * &ops.h));
        for (r, v) in y.transpose().iter().enumerate() {
            a[(r, k)] = *v;
        }
    }
    Ok(a)
}

/// `(tr{AA†}, tr{AA})/(m_s² m_b²)` from the dense superoperator.
pub fn brute_force_moments(ops: &FiniteBasisOperators) -> Result<(f64, f64)> {
    let a = projected_liouvillian(ops)?;
    let norm = (ops.dim() * ops.dim()) as f64;
    let aad = a.iter().map(|z| z.norm_sqr()).sum::<f64>() / norm;
    let big = a.nrows();
    let mut aa = Complex64::new(0.0, 0.0);
    for i in 0..big {
        for j in 0..big {
            aa += a[(i, j)] * a[(j, i)];
        }
    }
    Ok((aad, aa.re / norm))
}

/// Where the spectrum of `QLQ` sits relative to the elliptic support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSupport {
    /// Share of eigenvalues inside the ellipse scaled by `inflate`.
    pub fraction_inside: f64,
    /// `max |Re z| / q`.
    pub max_real_ratio: f64,
    /// `max |Im z| / p`; infinite when `p = 0` and some `Im z ≠ 0`.
    pub max_imag_ratio: f64,
}

pub fn spectrum_support(ops: &FiniteBasisOperators, inflate: f64) -> Result<SpectrumSupport> {
    let (aad, aa) = brute_force_moments(ops)?;
    let k = KernelParams::from_moments(aad, aa)?;
    let (sx, sy) = ellipse_semiaxes(&k)?;
    let a = projected_liouvillian(ops)?;
    let ev = a
        .schur()
        .eigenvalues()
        .ok_or_else(|| invalid("ops", "Schur form did not triangularize"))?;
    let ratio = |v: f64, s: f64| if v == 0.0 { 0.0 } else { v / s };
    let mut inside = 0usize;
    let (mut re_max, mut im_max) = (0.0f64, 0.0f64);
    for z in ev.iter() {
        let rx = ratio(z.im.abs(), sx * inflate);
        let ry = ratio(z.re.abs(), sy * inflate);
        if rx * rx + ry * ry <= 1.0 {
            inside += 1;
        }
        re_max = re_max.max(ratio(z.re.abs(), sy));
        im_max = im_max.max(ratio(z.im.abs(), sx));
    }
    Ok(SpectrumSupport {
        fraction_inside: inside as f64 / ev.len() as f64,
        max_real_ratio: re_max,
        max_imag_ratio: im_max,
    })
}

/// Kernel rates for the model from the `m_b` lowest bath states.
pub fn model_kernel(params: &ModelParams, bath: &BathEnsemble, m_b: usize) -> Result<KernelParams> {
    let ops = assemble_finite_h(params, bath, m_b)?;
    let (aad, aa) = moments_closed_form(&ops);
    KernelParams::from_moments(aad, aa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::LanczosOptions;
    use crate::testutil::dense_model;
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        let x = CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        (&x + x.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn random_diag_density(m: usize, rng: &mut ChaCha8Rng) -> CMat {
        let w: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 0.05).collect();
        let s: f64 = w.iter().sum();
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            m,
            w.iter().map(|x| Complex64::new(x / s, 0.0)),
        ))
    }

    fn random_ops(m_b: usize, seed: u64) -> FiniteBasisOperators {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(2 * m_b, &mut rng);
        let b = random_diag_density(m_b, &mut rng);
        FiniteBasisOperators::new(h, b, 2).unwrap()
    }

    #[test]
    fn memory_function_values() {
        let k = KernelParams::from_rates(1.0, 1.0).unwrap();
        assert_eq!(memory_function(&k, 0.0), 1.0);
        let want =
            (1.0 - 4.0 / (3.0 * PI) + 0.125 - 4.0 / (45.0 * PI) + 1.0 / 48.0) * (-0.125f64).exp();
        assert!((memory_function(&k, 1.0) - want).abs() < 1e-15);
        assert_eq!(memory_function(&k, -1.0), memory_function(&k, 1.0));
        let stat = KernelParams::from_rates(0.0, 0.0).unwrap();
        assert_eq!(memory_function(&stat, 123.0), 1.0);
        let fast = KernelParams::from_rates(1.0, 100.0).unwrap();
        assert_eq!(memory_function(&fast, 10.0), 0.0);
    }

    #[test]
    fn rates_from_moments() {
        let k = KernelParams::from_moments(4.0, 0.0).unwrap();
        assert_eq!((k.p, k.q), (2.0, 2.0));
        assert_eq!(ellipse_semiaxes(&k).unwrap(), (2.0, 2.0));
        let line = KernelParams::from_moments(4.0, 4.0).unwrap();
        assert_eq!(ellipse_semiaxes(&line).unwrap().0, 0.0);
        assert!(KernelParams::from_moments(0.0, 0.0).is_err());
        assert!(KernelParams::from_moments(1.0, 1.5).is_err());
        let r = KernelParams::from_rates(0.3, 1.7).unwrap();
        let back = KernelParams::from_moments(r.aad, r.aa).unwrap();
        assert!((back.p - 0.3).abs() < 1e-14 && (back.q - 1.7).abs() < 1e-14);
    }

    #[test]
    fn bath_density_examples() {
        let b = canonical_bath_density(&[0.0, 0.02 * 2f64.ln()], 0.02, 2).unwrap();
        assert!((b[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((b[(1, 1)].re - 1.0 / 3.0).abs() < 1e-15);
        let flat = canonical_bath_density(&[1.0; 3], 0.5, 3).unwrap();
        assert!((flat[(2, 2)].re - 1.0 / 3.0).abs() < 1e-15);
        let cold = canonical_bath_density(&[0.0, 1.0], 1e-4, 2).unwrap();
        assert_eq!(cold[(1, 1)].re, 0.0);
        assert!(canonical_bath_density(&[0.0], 1.0, 2).is_err());
    }

    #[test]
    fn zero_hamiltonian_has_zero_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ops = FiniteBasisOperators::new(CMat::zeros(6, 6), random_diag_density(3, &mut rng), 2)
            .unwrap();
        assert_eq!(moments_closed_form(&ops), (0.0, 0.0));
        assert_eq!(brute_force_moments(&ops).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn closed_form_matches_superoperator() {
        for m_b in 2..=4 {
            for seed in 0..10 {
                let ops = random_ops(m_b, 100 * m_b as u64 + seed);
                let (a1, b1) = moments_closed_form(&ops);
                let (a2, b2) = brute_force_moments(&ops).unwrap();
                assert!((a1 - a2).abs() <= 1e-10 * a2.abs(), "aad {a1} vs {a2}");
                assert!((b1 - b2).abs() <= 1e-10 * a2.abs(), "aa {b1} vs {b2}");
                assert!(a2 >= b2.abs());
            }
        }
    }

    #[test]
    fn projector_is_idempotent() {
        let ops = random_ops(3, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x = random_hermitian(6, &mut rng);
        let px = ops.project(&x);
        assert!((ops.project(&px) - &px).norm() < 1e-12);
        // tr_b of the projection reproduces tr_b χ
        assert!((ops.tr_b(&px) - ops.tr_b(&x)).norm() < 1e-12);
    }

    #[test]
    fn oversized_oracle_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ops = FiniteBasisOperators::new(
            random_hermitian(66, &mut rng),
            random_diag_density(33, &mut rng),
            2,
        )
        .unwrap();
        assert!(matches!(
            brute_force_moments(&ops),
            Err(Error::TooLarge { .. })
        ));
    }

    fn model(n_s: usize, n_eig: usize, lambda0: f64) -> (ModelParams, BathEnsemble) {
        let w: Vec<f64> = (0..n_s).map(|i| 0.45 + 0.1 * i as f64).collect();
        let mut p = ModelParams::standard(2.0, w);
        p.n_eig = n_eig;
        p.lambda0 = lambda0;
        let e = BathEnsemble::build(&p, &LanczosOptions::default()).unwrap();
        (p, e)
    }

    #[test]
    fn finite_h_full_basis_matches_dense_spectrum() {
        let (p, e) = model(2, 4, 1.0);
        let ops = assemble_finite_h(&p, &e, 4).unwrap();
        assert!((&ops.h - ops.h.adjoint()).norm() < 1e-12);
        let mut got: Vec<f64> = SymmetricEigen::new(ops.h.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        let mut want: Vec<f64> = SymmetricEigen::new(dense_model(&p, true))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn decoupled_finite_h_is_block_diagonal() {
        let (p, e) = model(3, 4, 0.0);
        let ops = assemble_finite_h(&p, &e, 4).unwrap();
        let mut got: Vec<f64> = SymmetricEigen::new(ops.h.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        let w = (p.omega0 * p.omega0 / 4.0 + p.beta * p.beta).sqrt();
        let mut want: Vec<f64> = e.energies.iter().flat_map(|&x| [x - w, x + w]).collect();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn model_rates_are_real() {
        let (p, e) = model(4, 8, 1.0);
        let ops = assemble_finite_h(&p, &e, 8).unwrap();
        let (aad, aa) = moments_closed_form(&ops);
        assert!(aad >= aa.abs(), "{aad} {aa}");
        let k = model_kernel(&p, &e, 8).unwrap();
        assert!(k.p >= 0.0 && k.q > 0.0);
    }

    #[test]
    fn spectrum_frequencies_within_support() {
        let mut worst: f64 = 0.0;
        let mut inside = 0.0;
        for seed in 0..20 {
            let s = spectrum_support(&random_ops(2, seed), 1.5).unwrap();
            worst = worst.max(s.max_real_ratio);
            inside += s.fraction_inside / 20.0;
        }
        assert!(worst <= 1.5, "{worst}");
        assert!(inside > 0.5, "{inside}");
    }
}
