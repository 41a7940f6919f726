//! Lowest eigenstates of an isolated 10-spin bath, their Boltzmann weights,
//! and the mean-field coefficients `β̃` and `C`.

use spinbath::bath::{debye_frequencies, BathEnsemble, FrequencyMode, LanczosOptions};
use spinbath::ModelParams;

fn main() -> spinbath::Result<()> {
    let omegas = debye_frequencies(10, 1.0, FrequencyMode::Deterministic)?;
    println!("ω_j = {omegas:.4?}");
    for lambda in [2.0, 4.0, 10.0] {
        let params = ModelParams {
            n_eig: 8,
            ..ModelParams::standard(lambda, omegas.clone())
        };
        let bath = BathEnsemble::build(&params, &LanczosOptions::default())?;
        let mf = bath.mean_field(&params);
        println!("\nλ = {lambda}");
        for (m, (e, p)) in bath.energies.iter().zip(&bath.weights).enumerate() {
            println!("  m = {:>2}  ε = {e:>10.5}  p = {p:.3e}", m + 1);
        }
        println!(
            "  ⟨Σx⟩ = {:.5}  Var Σx = {:.5}  β̃ = {:.5}  C = {:.5}",
            bath.sigma_x_mean, bath.sigma_x_var, mf.beta_eff, mf.c
        );
    }
    Ok(())
}
