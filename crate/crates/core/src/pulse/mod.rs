//! Rotating frames (including the uncoupling frame) and shaped RF pulses.

mod frame;
mod shaped;

pub use frame::{cross_block_norm, frame_hamiltonian, uncoupling_offsets, Frame};
pub use shaped::{
    calibrate_amplitude, pulse_propagator, simultaneous_pulse_propagator, su2_rotation_angle, Envelope,
    IntegratorSettings, PulsePropagation, ShapedPulse,
};
