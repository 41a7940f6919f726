//! Mean-field master equation on the auxiliary grid against the direct
//! memory quadrature, for growing grid sizes.

use spinbath::bath::MeanFieldCoupling;
use spinbath::kernel::KernelParams;
use spinbath::mft::{
    build_grid, solve_mft, solve_mft_quadrature, GridScheme, MftProblem, QUADRATURE_SUBSTEPS,
};

fn main() -> spinbath::Result<()> {
    let problem = MftProblem {
        omega0: 0.8288,
        coupling: MeanFieldCoupling {
            beta_eff: 0.006,
            c: 0.3,
        },
        kernel: KernelParams::from_rates(0.06, 1.25)?,
    };
    let reference = solve_mft_quadrature(&problem, 10.0, 0.1, QUADRATURE_SUBSTEPS)?;
    let z_ref = reference.column(3);
    for n in [50, 80, 120] {
        let grid = build_grid(n, 0.1)?;
        let traj = solve_mft(&problem, &grid, GridScheme::default(), 10.0, 0.1)?;
        let err = traj
            .column(3)
            .iter()
            .zip(&z_ref)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "n = {n:>3}  u ∈ [{:.1}, {:.1}]  sup |Z − Z_quad| = {err:.2e}",
            grid.u[n - 1],
            grid.u[0]
        );
    }
    let last = reference.densities.last().unwrap();
    println!(
        "quadrature at t = 10: Z = {:.4}, S = {:.4}",
        last.rho11 - last.rho00,
        spinbath::observables::entropy(last)
    );
    Ok(())
}
