//! Quantum Rabi model toolkit.
//!
//! A single qubit coupled to one truncated bosonic mode,
//! `H = ω_c a†a + (ω_q/2) σ_z + g (a + a†)(σ₋ + σ₊)`.
//! The crate covers the ground-state phase diagram under `ω_c ω_q = 1`,
//! the correlation and fluctuation diagnostics used to locate the
//! superradiant transition, and sudden-quench dynamics under a
//! dressed-basis thermal master equation.
//!
//! Every joint operator uses the ordering qubit ⊗ cavity. The qubit basis is
//! `[|e⟩, |g⟩]` with `σ_z |e⟩ = +|e⟩`, so joint index `q * (n_max + 1) + n`
//! labels `|q, n⟩`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![warn(rust_2018_idioms)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod density;
pub mod dynamics;
mod error;
pub mod linalg;
mod math;
pub mod observables;
pub mod operators;
pub mod phase_diagram;
pub mod spectrum;

pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use operators::{Basis, FockCutoff, ModelParams, OperatorMatrix, Subsystem};

/// Complex scalar used for every matrix in the crate.
pub use num_complex::Complex64;
