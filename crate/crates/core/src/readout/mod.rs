//! Free induction decays, spectra, population measurement and full state
//! tomography.

mod fid;
mod fit;
mod populations;
mod spectrum;
mod sweep;
mod tomography;

pub use fid::{
    line_amplitudes, readout_unitary, receiver_phases, simulate_fid, synthesize, transition_lines, Acquisition, Channel,
    Fid, Line,
};
pub use fit::{LineFit, SINGULAR_THRESHOLD};
pub use populations::{measure_populations, populations_from_spectra};
pub use spectrum::{spectrum, Spectrum, DEFAULT_ZERO_FILL};
pub use sweep::{flip_error_sweep, SweepPoint};
pub use tomography::{
    deviation_error_norm, full_tomography, pauli_string, readout_settings, ReadoutPulse, Tomography, TomographyResult,
    MAX_CONDITION,
};
