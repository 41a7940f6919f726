//! Memory-function parameters from the projected-Liouvillian moments, checked
//! against the dense superoperator for a small random problem, then `W(t)`
//! for a 10-spin bath.

use nalgebra::DMatrix;
use num_complex::Complex64;
use spinbath::bath::{debye_frequencies, BathEnsemble, FrequencyMode, LanczosOptions};
use spinbath::kernel::{
    brute_force_moments, canonical_bath_density, model_kernel, moments_closed_form,
    FiniteBasisOperators,
};
use spinbath::ModelParams;

fn main() -> spinbath::Result<()> {
    // 2 system × 3 bath states, fixed Hermitian H
    let h = DMatrix::from_fn(6, 6, |i, j| {
        let (a, b) = (i.min(j) as f64, i.max(j) as f64);
        let im = if i < j {
            0.1 * (a + 1.0)
        } else if i > j {
            -0.1 * (a + 1.0)
        } else {
            0.0
        };
        Complex64::new((a + 2.0 * b).sin(), im)
    });
    let b = canonical_bath_density(&[0.0, 0.3, 0.5], 0.4, 3)?;
    let ops = FiniteBasisOperators::new(h, b, 2)?;
    println!("closed form  {:?}", moments_closed_form(&ops));
    println!("superoperator {:?}", brute_force_moments(&ops)?);

    let omegas = debye_frequencies(10, 1.0, FrequencyMode::Deterministic)?;
    for lambda in [2.0, 4.0, 10.0] {
        let params = ModelParams {
            n_eig: 8,
            ..ModelParams::standard(lambda, omegas.clone())
        };
        let bath = BathEnsemble::build(&params, &LanczosOptions::default())?;
        let k = model_kernel(&params, &bath, 8)?;
        let w: Vec<String> = (0..=6)
            .map(|i| format!("{:.3}", k.memory(i as f64)))
            .collect();
        println!(
            "λ = {lambda:>4}: p = {:.4}, q = {:.4}, W(0..6) = [{}]",
            k.p,
            k.q,
            w.join(", ")
        );
    }
    Ok(())
}
