//! Spin systems, operators, states and their free dynamics.

mod hamiltonian;
pub(crate) mod operator;
mod state;
mod system;

pub use hamiltonian::{build_hamiltonian, hamiltonian_diagonal, m_z};
pub use operator::{phase_aligned_distance, rotation_unitary, rotation_with_phase, Axis, Operator, SpinOp};
pub use state::{
    dephase, evolve, principal_block, subspace_block, thermal_state, DensityMatrix, Polarization, SubspaceBlock,
};
pub(crate) use state::dephase_in_place;
pub use system::{SpinSystem, BROMOTRIFLUOROETHYLENE_CFG, DEFAULT_T2_S};
