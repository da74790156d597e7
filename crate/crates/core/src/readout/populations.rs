use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pulse::Frame;
use crate::readout::{readout_unitary, simulate_fid, transition_lines, Acquisition, LineFit, SINGULAR_THRESHOLD};
use crate::sequence::{PulseSequence, Simulator};
use crate::spin::{Axis, DensityMatrix, SpinSystem};

/// Runs `preparation` on `rho0` and measures the populations by partial
/// tomography in the frame at the end of the preparation.
pub fn measure_populations(
    sim: &Simulator,
    rho0: &DensityMatrix,
    preparation: &PulseSequence,
    acq: &Acquisition,
) -> Result<Vec<f64>> {
    let (rho, frame) = sim.run_to_end(rho0, preparation)?;
    populations_from_spectra(&rho, sim.system(), &frame, acq)
}

/// Relative populations `p − 1/2ⁿ` (summing to zero) of `rho`.
///
/// For every spin a separate experiment applies a 90° ŷ read-out pulse to
/// that spin and records its lines. A line measures `(p_from − p_to)/2`. The
/// differences plus the zero-sum condition are solved by least squares.
pub fn populations_from_spectra(rho: &DensityMatrix, sys: &SpinSystem, frame: &Frame, acq: &Acquisition) -> Result<Vec<f64>> {
    let d = sys.dim();
    let mut rows: Vec<(usize, usize, f64)> = Vec::new();
    for spin in 0..sys.n() {
        let lines = transition_lines(sys, frame, spin)?;
        let fit = LineFit::new(&lines, acq)?;
        let read = rho.transformed(&readout_unitary(sys, &[spin], Axis::Y)?);
        let fid = simulate_fid(&read, sys, frame, &[spin], acq)?;
        let amps = fit.amplitudes(&fid.channels[0].samples)?;
        for (l, a) in lines.iter().zip(amps) {
            rows.push((l.from, l.to, 2.0 * a.re));
        }
    }
    let m = rows.len() + 1;
    let mut a = DMatrix::<f64>::zeros(m, d);
    let mut b = DVector::<f64>::zeros(m);
    for (k, &(from, to, diff)) in rows.iter().enumerate() {
        a[(k, from)] = 1.0;
        a[(k, to)] = -1.0;
        b[k] = diff;
    }
    a.row_mut(m - 1).fill(1.0);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > SINGULAR_THRESHOLD * smax) {
        return Err(Error::Singular(format!("population system has rank < {d}")));
    }
    let x = svd.solve(&b, 0.0).map_err(|e| Error::Singular(e.to_string()))?;
    Ok(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::labeling_sequence;
    use crate::spin::{thermal_state, Polarization};

    fn check(got: &[f64], pattern: [f64; 8], scale: f64) {
        for (g, p) in got.iter().zip(pattern) {
            assert!((g - p * scale).abs() < 1e-12, "{got:?}");
        }
        assert!(got.iter().sum::<f64>().abs() < 1e-14);
    }

    #[test]
    fn thermal_pattern() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let sim = Simulator::ideal(&sys).unwrap();
        let a = 0.01;
        let rho = thermal_state(&sys, &Polarization::Homonuclear(a)).unwrap();
        let empty = PulseSequence::new("none", Frame::resonant(3));
        let p = measure_populations(&sim, &rho, &empty, &Acquisition::default()).unwrap();
        check(&p, [3., 1., 1., -1., 1., -1., -1., -3.], a / 8.0);
    }

    #[test]
    fn labeled_pattern() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let sim = Simulator::ideal(&sys).unwrap();
        let a = 0.01;
        let rho = thermal_state(&sys, &Polarization::Homonuclear(a)).unwrap();
        let p = measure_populations(&sim, &rho, &labeling_sequence(&sys).unwrap(), &Acquisition::default()).unwrap();
        check(&p, [3., -1., -1., -1., 1., 1., 1., -3.], a / 8.0);
    }

    #[test]
    fn identity_is_zero() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let p = populations_from_spectra(&DensityMatrix::maximally_mixed(3), &sys, &Frame::resonant(3), &Acquisition::default())
            .unwrap();
        check(&p, [0.0; 8], 0.0);
    }

    #[test]
    fn degenerate_lines_are_reported() {
        // no couplings: every spin's lines coincide
        let sys = SpinSystem::new(vec!["A".into(), "B".into()], vec![0.0, 100.0], &[], vec![6.0, 6.0]).unwrap();
        let err = populations_from_spectra(&DensityMatrix::maximally_mixed(2), &sys, &Frame::resonant(2), &Acquisition::default());
        assert!(matches!(err, Err(Error::Singular(_))));
    }
}
