//! Thermal ensemble of exact trajectories for an 8-spin bath at λ = 2, with
//! the central-spin entropy and Bloch vector printed every 2 time units.

use spinbath::bath::{debye_frequencies, BathEnsemble, FrequencyMode, LanczosOptions};
use spinbath::exact::{thermal_reduced_density, ExactOptions};
use spinbath::ModelParams;

fn main() -> spinbath::Result<()> {
    let omegas = debye_frequencies(8, 1.0, FrequencyMode::Deterministic)?;
    let params = ModelParams {
        n_eig: 6,
        ..ModelParams::standard(2.0, omegas)
    };
    let bath = BathEnsemble::build(&params, &LanczosOptions::default())?;
    let opts = ExactOptions {
        dt_out: 2.0,
        ..ExactOptions::new(20.0, 0.1)
    };
    let traj = thermal_reduced_density(&params, &bath, &opts)?;
    println!("{:>5} {:>8} {:>9} {:>9} {:>9}", "t", "S", "X", "Y", "Z");
    for (t, [s, x, y, z]) in traj.times.iter().zip(traj.observables()) {
        println!("{t:>5.1} {s:>8.4} {x:>9.4} {y:>9.4} {z:>9.4}");
    }
    Ok(())
}
