//! Bitwise Pauli action on a 3-qubit register and the matrix-free model
//! Hamiltonian applied to `|1⟩ ⊗ |00⟩`.

use num_complex::Complex64;
use spinbath::spin::{apply_hamiltonian, apply_sigma, Axis};
use spinbath::{ModelParams, PureState};

fn show(label: &str, s: &PureState) {
    let nz: Vec<String> = s
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-12)
        .map(|(i, a)| format!("({:.3}{:+.3}i)|{i:03b}⟩", a.re + 0.0, a.im + 0.0))
        .collect();
    println!("{label:>12}: {}", nz.join(" + "));
}

fn main() -> spinbath::Result<()> {
    // |101⟩: qubit 0 and qubit 2 set
    let s = PureState::basis(3, 0b101)?;
    show("ψ", &s);
    for (axis, name) in [
        (Axis::X, "σx(1) ψ"),
        (Axis::Y, "σy(1) ψ"),
        (Axis::Z, "σz(1) ψ"),
    ] {
        show(name, &apply_sigma(&s, axis, 1)?);
    }

    // two bath spins; the system is the top bit
    let params = ModelParams::standard(2.0, vec![0.6, 0.9]);
    let bath = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    ];
    let psi = PureState::excited_product(&bath)?;
    show("H |1⟩|00⟩", &apply_hamiltonian(&psi, &params)?);
    Ok(())
}
