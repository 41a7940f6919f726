//! Central spin coupled to a self-interacting spin bath: exact thermal
//! Schrödinger dynamics and a mean-field non-Markovian master equation.
//!
//! The crate is organized bottom-up:
//!
//! - [`spin`]: bitstring states, matrix-free Pauli and Hamiltonian action.
//! - [`ode`]: fixed-step eighth-order Runge–Kutta.
//! - [`bath`]: Debye frequencies, Lanczos eigenpairs, canonical averages.
//! - [`exact`]: thermal ensemble propagation and the reduced density.
//! - [`observables`]: entropy and spin components of a qubit density.
//! - [`kernel`]: moments of the projected Liouvillian and the memory function.
//! - [`mft`]: auxiliary-field and direct-quadrature master-equation solvers.
//! - [`config`], [`run`], [`svg`]: configuration, orchestration and output.
//!
//! Units have `ħ = 1`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod config;
pub mod error;
pub mod exact;
pub mod kernel;
pub mod mft;
pub mod observables;
pub mod ode;
pub mod run;
pub mod spin;
pub mod svg;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use observables::DensityMatrix2;
pub use spin::{ModelParams, PureState};
