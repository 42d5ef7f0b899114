//! Simulator for n-slit interference built from classical ingredients:
//! Gaussian channels undergoing ballistic diffusion, their emergent average
//! velocity fields, an explicit finite-difference diffusion solver, and
//! averaged trajectories — together with a standard quantum-mechanical
//! reference (wavefunction, probability current, quantum potential) that
//! every classically computed field is checked against.
//!
//! Grid kernels are data-parallel via rayon when the default `parallel`
//! feature is enabled; disabling it falls back to sequential loops with
//! bit-identical results.

pub mod channel;
pub mod error;
pub mod field;
pub mod model;
pub mod oracle;
pub mod superpose;

pub mod fdm;
pub mod trajectories;

pub use error::{Error, Result};
