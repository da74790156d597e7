use num_complex::Complex64;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pulse::Frame;
use crate::readout::{line_amplitudes, receiver_phases, simulate_fid, transition_lines, Acquisition, LineFit};
use crate::sequence::{PulseSequence, Simulator};
use crate::spin::{rotation_with_phase, Axis, DensityMatrix, Operator, SpinSystem};
use crate::CMatrix;

/// Condition numbers above this are rejected.
pub const MAX_CONDITION: f64 = 1e10;

/// Read-out choice for one spin in one tomography experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadoutPulse {
    None,
    X90,
    Y90,
}

impl ReadoutPulse {
    pub const ALL: [ReadoutPulse; 3] = [ReadoutPulse::None, ReadoutPulse::X90, ReadoutPulse::Y90];
}

/// Every combination of `{none, X90, Y90}` over `n` spins, first spin varying
/// slowest.
pub fn readout_settings(n: usize) -> Vec<Vec<ReadoutPulse>> {
    let count = 3usize.pow(n as u32);
    (0..count)
        .map(|mut k| {
            let mut s = vec![ReadoutPulse::None; n];
            for slot in s.iter_mut().rev() {
                *slot = ReadoutPulse::ALL[k % 3];
                k /= 3;
            }
            s
        })
        .collect()
}

fn setting_unitary(n: usize, setting: &[ReadoutPulse]) -> Result<Operator> {
    let mut u = Operator::identity(1 << n);
    for (spin, p) in setting.iter().enumerate() {
        let axis = match p {
            ReadoutPulse::None => continue,
            ReadoutPulse::X90 => Axis::X,
            ReadoutPulse::Y90 => Axis::Y,
        };
        u = &rotation_with_phase(n, spin, axis.phase(), std::f64::consts::FRAC_PI_2)? * &u;
    }
    Ok(u)
}

/// Tensor product of Pauli matrices, `index` in base 4 (0 = I, 1 = X, 2 = Y,
/// 3 = Z), first spin most significant.
pub fn pauli_string(n: usize, index: usize) -> CMatrix {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let paulis = [[[o, z], [z, o]], [[z, o], [o, z]], [[z, -i], [i, z]], [[o, z], [z, -o]]];
    let mut m = CMatrix::from_element(1, 1, o);
    for spin in 0..n {
        let p = paulis[(index >> (2 * (n - 1 - spin))) & 3];
        let p = CMatrix::from_fn(2, 2, |r, c| p[r][c]);
        m = m.kronecker(&p);
    }
    m
}

#[derive(Debug, Clone)]
pub struct TomographyResult {
    /// Reconstructed traceless deviation `ρ − I/2ⁿ`.
    pub deviation: CMatrix,
    pub condition_number: f64,
    /// Norm of the least-squares residual.
    pub residual: f64,
}

/// Full deviation-matrix tomography from `3ⁿ` read-out experiments.
///
/// Every experiment records all channels; each line's complex amplitude is a
/// linear function of the deviation matrix. The stacked real system over the
/// traceless Pauli basis is inverted once by SVD.
#[derive(Debug, Clone)]
pub struct Tomography {
    sys: SpinSystem,
    frame: Frame,
    acq: Acquisition,
    settings: Vec<Vec<ReadoutPulse>>,
    unitaries: Vec<Operator>,
    fits: Vec<LineFit>,
    pinv: DMatrix<f64>,
    design: DMatrix<f64>,
    condition_number: f64,
    pub execution: Execution,
}

impl Tomography {
    pub fn new(sys: &SpinSystem, frame: &Frame, acq: &Acquisition) -> Result<Self> {
        frame.check(sys)?;
        let n = sys.n();
        let settings = readout_settings(n);
        let unitaries = settings.iter().map(|s| setting_unitary(n, s)).collect::<Result<Vec<_>>>()?;
        let all_lines = (0..n).map(|s| transition_lines(sys, frame, s)).collect::<Result<Vec<_>>>()?;
        let fits = all_lines.iter().map(|l| LineFit::new(l, acq)).collect::<Result<Vec<_>>>()?;
        let phases = receiver_phases(sys)?;

        let d = sys.dim();
        let unknowns = d * d - 1;
        let per_setting: usize = all_lines.iter().map(|l| 2 * l.len()).sum();
        let mut design = DMatrix::<f64>::zeros(settings.len() * per_setting, unknowns);
        for k in 0..unknowns {
            let delta = pauli_string(n, k + 1) / Complex64::new(d as f64, 0.0);
            for (si, u) in unitaries.iter().enumerate() {
                let rotated = u.matrix() * &delta * u.matrix().adjoint();
                let rho = DensityMatrix::from_raw(rotated);
                let mut row = si * per_setting;
                for (spin, lines) in all_lines.iter().enumerate() {
                    for a in line_amplitudes(&rho, lines, phases[spin]) {
                        design[(row, k)] = a.re;
                        design[(row + 1, k)] = a.im;
                        row += 2;
                    }
                }
            }
        }
        let svd = design.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let condition_number = smax / smin;
        if !(condition_number < MAX_CONDITION) {
            return Err(Error::IllConditioned(condition_number));
        }
        let pinv = svd.pseudo_inverse(0.0).map_err(|e| Error::Singular(e.to_string()))?;
        Ok(Tomography {
            sys: sys.clone(),
            frame: frame.clone(),
            acq: *acq,
            settings,
            unitaries,
            fits,
            pinv,
            design,
            condition_number,
            execution: Execution::default(),
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn settings(&self) -> &[Vec<ReadoutPulse>] {
        &self.settings
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// Line amplitudes of one experiment, fitted from the simulated FIDs.
    fn record(&self, rho: &DensityMatrix, setting: usize) -> Result<Vec<f64>> {
        let read = rho.transformed(&self.unitaries[setting]);
        let spins: Vec<usize> = (0..self.sys.n()).collect();
        let fid = simulate_fid(&read, &self.sys, &self.frame, &spins, &self.acq)?;
        let mut out = Vec::new();
        for (ch, fit) in fid.channels.iter().zip(&self.fits) {
            for a in fit.amplitudes(&ch.samples)? {
                out.extend([a.re, a.im]);
            }
        }
        Ok(out)
    }

    /// Reconstructs the deviation matrix of `rho` (read-out pulses are ideal).
    pub fn measure(&self, rho: &DensityMatrix) -> Result<TomographyResult> {
        if rho.dim() != self.sys.dim() {
            return Err(Error::DimensionMismatch { expected: self.sys.dim(), actual: rho.dim() });
        }
        let idx: Vec<usize> = (0..self.settings.len()).collect();
        let records = self.execution.try_map(&idx, |&s| self.record(rho, s))?;
        let y = DVector::from_iterator(self.design.nrows(), records.into_iter().flatten());
        let c = &self.pinv * &y;
        let residual = (&self.design * &c - &y).norm();
        let n = self.sys.n();
        let d = self.sys.dim();
        let mut deviation = CMatrix::zeros(d, d);
        for (k, &ck) in c.iter().enumerate() {
            deviation += pauli_string(n, k + 1) * Complex64::new(ck / d as f64, 0.0);
        }
        Ok(TomographyResult { deviation, condition_number: self.condition_number, residual })
    }
}

/// Runs `preparation` on `rho0` and reconstructs the resulting deviation
/// matrix in the frame at the end of the preparation.
pub fn full_tomography(
    sim: &Simulator,
    rho0: &DensityMatrix,
    preparation: &PulseSequence,
    acq: &Acquisition,
    execution: Execution,
) -> Result<TomographyResult> {
    let (rho, frame) = sim.run_to_end(rho0, preparation)?;
    Tomography::new(sim.system(), &frame, acq)?.with_execution(execution).measure(&rho)
}

/// `‖δ_exp − δ_th‖_F / ‖δ_th‖_F` for deviation matrices.
pub fn deviation_error_norm(exp: &CMatrix, th: &CMatrix) -> Result<f64> {
    if exp.shape() != th.shape() {
        return Err(Error::DimensionMismatch { expected: th.nrows(), actual: exp.nrows() });
    }
    let den = th.norm();
    if den == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((exp - th).norm() / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::labeled_epr_preparation;
    use crate::spin::{thermal_state, Polarization};

    #[test]
    fn twenty_seven_settings() {
        let s = readout_settings(3);
        assert_eq!(s.len(), 27);
        assert_eq!(s[0], vec![ReadoutPulse::None; 3]);
        assert_eq!(s[26], vec![ReadoutPulse::Y90; 3]);
        let mut uniq = s.clone();
        uniq.dedup();
        assert_eq!(uniq.len(), 27);
    }

    #[test]
    fn paulis_are_orthogonal() {
        for a in 0..16 {
            for b in 0..16 {
                let tr = (pauli_string(2, a) * pauli_string(2, b)).trace();
                let want = if a == b { 4.0 } else { 0.0 };
                assert!((tr - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn thermal_state_is_diagonal() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let rho = thermal_state(&sys, &Polarization::Homonuclear(0.01)).unwrap();
        let tomo = Tomography::new(&sys, &Frame::resonant(3), &Acquisition::default()).unwrap();
        let r = tomo.measure(&rho).unwrap();
        assert!(deviation_error_norm(&r.deviation, &rho.deviation()).unwrap() < 1e-10);
        assert!(r.condition_number < 100.0);
    }

    #[test]
    fn zero_deviation_reconstructs_to_zero() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let tomo = Tomography::new(&sys, &Frame::resonant(3), &Acquisition::default()).unwrap();
        let r = tomo.measure(&DensityMatrix::maximally_mixed(3)).unwrap();
        assert!(r.deviation.norm() < 1e-15);
    }

    #[test]
    fn labeled_epr_structure() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let sim = Simulator::ideal(&sys).unwrap();
        let rho0 = thermal_state(&sys, &Polarization::Homonuclear(0.01)).unwrap();
        let prep = labeled_epr_preparation(&sys).unwrap();
        let r = full_tomography(&sim, &rho0, &prep, &Acquisition::default(), Execution::Sequential).unwrap();
        let dev = &r.deviation;
        // |0⟩_A block shifted to the effective pure state: four corners of ½
        let block = crate::spin::principal_block(&DensityMatrix::from_raw(dev.clone()), &[0, 1, 2, 3]).unwrap();
        let pure = block.effective_pure_state(block.effective_pure_weight());
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((pure[(i, j)].norm() - 0.5).abs() < 1e-9);
        }
        assert!(pure[(1, 1)].norm() < 1e-9 && pure[(2, 2)].norm() < 1e-9);
        assert!((pure[(0, 3)] - Complex64::new(0.5, 0.0)).norm() < 1e-9);
        // no coherence between the |0⟩_A and |1⟩_A subspaces
        for r in 0..4 {
            for c in 4..8 {
                assert!(dev[(r, c)].norm() < 1e-10);
            }
        }
    }

    #[test]
    fn norm_examples() {
        let th = pauli_string(3, 3) * Complex64::new(0.01, 0.0);
        assert_eq!(deviation_error_norm(&th, &th).unwrap(), 0.0);
        let exp = &th * Complex64::new(0.9, 0.0);
        assert!((deviation_error_norm(&exp, &th).unwrap() - 0.1).abs() < 1e-15);
        assert!(matches!(deviation_error_norm(&th, &CMatrix::zeros(8, 8)), Err(Error::ZeroNorm)));
    }
}
