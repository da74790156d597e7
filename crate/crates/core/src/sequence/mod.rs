//! Pulse sequences for labeling, CNOTs and Grover search, and the simulator
//! that executes them.

mod events;
mod executor;
mod gates;
mod grover;
mod labeling;

pub use events::{PulseSequence, PulseSpec, SequenceEvent};
pub use executor::{ErrorModel, PulseMode, RunOptions, Simulator};
pub use gates::{cnot_sequence, cnot_sequence_with, composite_z_variants, push_composite_z, SpectatorMode, ZVariant};
pub use grover::{
    grover_inversion_sequence, grover_iteration_sequence, grover_oracle_sequence, grover_preparation, grover_run, superposition_sequence,
    ideal_grover_iteration, parse_x0, select_z_variant, x0_label, GroverRun, GROVER_POLARIZATION,
};
pub use labeling::{labeled_epr_preparation, labeling_capacity, labeling_sequence, labeling_sequence_for, Capacity};
