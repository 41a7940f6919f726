//! Global error of the fixed-step eighth-order integrator on `y' = 1 + y²`
//! (solution `tan t`) as the step halves.

use spinbath::ode::{integrate, FnSystem};

fn main() -> spinbath::Result<()> {
    let mut last: Option<f64> = None;
    for k in 0..4 {
        let h = 0.2 / f64::from(1 << k);
        let mut sys = FnSystem::new(1, |_, y: &[f64], dy: &mut [f64]| dy[0] = 1.0 + y[0] * y[0]);
        let y = integrate(&mut sys, 0.0, &[0.0], 1.2, h, |_, _| Ok(()))?;
        let err = (y[0] - 1.2f64.tan()).abs();
        match last {
            Some(prev) => println!(
                "h = {h:.4}  error = {err:.3e}  order = {:.2}",
                (prev / err).log2()
            ),
            None => println!("h = {h:.4}  error = {err:.3e}"),
        }
        last = Some(err);
    }
    Ok(())
}
