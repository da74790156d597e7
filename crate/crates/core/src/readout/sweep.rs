use crate::error::Result;
use crate::exec::Execution;
use crate::readout::{deviation_error_norm, full_tomography, Acquisition};
use crate::sequence::{ErrorModel, PulseSequence, RunOptions, Simulator};
use crate::spin::{DensityMatrix, SpinSystem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub flip_error: f64,
    /// Relative Frobenius error of the reconstructed deviation matrix
    /// against the ideal-pulse, relaxation-free preparation.
    pub norm: f64,
}

/// Tomography error of `preparation` for each flip-angle error, with the
/// rest of `base` (pulse mode, phase offset, dephasing) unchanged. Points are
/// evaluated according to `execution` and returned in input order.
pub fn flip_error_sweep(
    sys: &SpinSystem,
    base: RunOptions,
    rho0: &DensityMatrix,
    preparation: &PulseSequence,
    flip_errors: &[f64],
    acq: &Acquisition,
    execution: Execution,
) -> Result<Vec<SweepPoint>> {
    let reference = Simulator::ideal(sys)?.run(rho0, preparation)?.deviation();
    execution.try_map(flip_errors, |&eps| {
        let errors = ErrorModel { flip_error: eps, ..base.errors };
        let sim = Simulator::new(sys, base.with_errors(errors))?;
        let tomo = full_tomography(&sim, rho0, preparation, acq, execution)?;
        Ok(SweepPoint { flip_error: eps, norm: deviation_error_norm(&tomo.deviation, &reference)? })
    })
}
