//! Exact density-matrix simulation of bulk-NMR quantum computation on small
//! weakly coupled spin systems.
//!
//! The crate covers the full experiment chain for a logically labeled
//! effective pure state:
//!
//! * [`spin`]: spin systems, operators, thermal states, propagation, dephasing.
//! * [`pulse`]: rotating and uncoupling frames, shaped RF pulses.
//! * [`sequence`]: pulse sequences for labeling, CNOTs, Grover search, and a
//!   simulator that executes them with optional pulse errors.
//! * [`readout`]: FIDs, spectra, population measurement, 27-experiment state
//!   tomography and error norms.
//! * [`dsl`]: a small text format for pulse programs.
//!
//! Basis states are ordered `|00…0⟩ … |11…1⟩` with the first spin as the most
//! significant bit, and `|0⟩` is the ground state (`I_z|0⟩ = +½|0⟩`).

pub mod config;
pub mod dsl;
pub mod error;
pub mod exec;
pub mod pulse;
pub mod readout;
pub mod sequence;
pub mod spin;

pub use error::{Error, Result};
pub use exec::Execution;
pub use num_complex::Complex64;

/// Dense complex matrix used for operators and states.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
