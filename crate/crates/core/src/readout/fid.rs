use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulse::Frame;
use crate::spin::{hamiltonian_diagonal, rotation_with_phase, Axis, DensityMatrix, Operator, SpinSystem};

/// Sampling of a free induction decay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Acquisition {
    /// Seconds.
    pub duration: f64,
    /// Sample interval, seconds.
    pub dt: f64,
}

impl Default for Acquisition {
    /// 4 s at 1 ms.
    fn default() -> Self {
        Acquisition { duration: 4.0, dt: 1e-3 }
    }
}

impl Acquisition {
    pub fn new(duration: f64, dt: f64) -> Result<Self> {
        let a = Acquisition { duration, dt };
        a.validate()?;
        Ok(a)
    }

    pub fn samples(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn nyquist_hz(&self) -> f64 {
        1.0 / (2.0 * self.dt)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples()).map(move |k| k as f64 * self.dt)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidAcquisition(format!("dt {} must be positive", self.dt)));
        }
        if !(self.duration.is_finite() && self.samples() >= 2) {
            return Err(Error::InvalidAcquisition(format!(
                "duration {} s gives fewer than 2 samples at dt {} s",
                self.duration, self.dt
            )));
        }
        Ok(())
    }
}

/// A single-quantum transition of one spin between `|from⟩` (spin in `|0⟩`)
/// and `|to⟩` (spin in `|1⟩`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub spin: usize,
    pub from: usize,
    pub to: usize,
    /// Frame-relative frequency, Hz.
    pub freq_hz: f64,
    /// `1/T₂` of the observed spin, 1/s.
    pub decay_rate: f64,
}

/// The `2ⁿ⁻¹` lines of `spin`, ordered by `from`.
///
/// The signal is `Tr(ρ I₋)`, so the coherence `ρ_{from,to}` evolves as
/// `exp(i(E_to − E_from)t)`: a line sits at `−Δ − Σ_j J_ij m_j` in the frame.
pub fn transition_lines(sys: &SpinSystem, frame: &Frame, spin: usize) -> Result<Vec<Line>> {
    sys.check_spin(spin)?;
    let diag = hamiltonian_diagonal(sys, frame)?;
    let bit = sys.bit(spin);
    Ok((0..sys.dim())
        .filter(|r| r & bit == 0)
        .map(|r| Line {
            spin,
            from: r,
            to: r | bit,
            freq_hz: (diag[r | bit] - diag[r]) / TAU,
            decay_rate: 1.0 / sys.t2(spin),
        })
        .collect())
}

/// Per-channel receiver phases from a reference experiment: `|00…0⟩`
/// followed by a 90° ŷ read-out pulse must give a positive absorptive line.
pub fn receiver_phases(sys: &SpinSystem) -> Result<Vec<f64>> {
    let mut psi = vec![Complex64::new(0.0, 0.0); sys.dim()];
    psi[0] = Complex64::new(1.0, 0.0);
    let reference = DensityMatrix::pure(&psi)?;
    (0..sys.n())
        .map(|s| {
            let rho = reference.transformed(&rotation_with_phase(sys.n(), s, Axis::Y.phase(), PI / 2.0)?);
            Ok(rho.get(0, sys.bit(s)).arg())
        })
        .collect()
}

/// Ideal 90° read-out pulses about `axis` on each listed spin.
pub fn readout_unitary(sys: &SpinSystem, spins: &[usize], axis: Axis) -> Result<Operator> {
    let mut u = Operator::identity(sys.dim());
    for &s in spins {
        sys.check_spin(s)?;
        u = &rotation_with_phase(sys.n(), s, axis.phase(), PI / 2.0)? * &u;
    }
    Ok(u)
}

/// Phase-corrected complex amplitudes of each line at `t = 0`.
pub fn line_amplitudes(rho: &DensityMatrix, lines: &[Line], receiver_phase: f64) -> Vec<Complex64> {
    let rot = Complex64::from_polar(1.0, -receiver_phase);
    lines.iter().map(|l| rho.get(l.from, l.to) * rot).collect()
}

/// One acquisition channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub spin: usize,
    pub samples: Vec<Complex64>,
}

/// Sampled transverse magnetization, one channel per observed spin.
#[derive(Debug, Clone, PartialEq)]
pub struct Fid {
    pub dt: f64,
    pub frame: Frame,
    pub channels: Vec<Channel>,
}

impl Fid {
    pub fn channel(&self, spin: usize) -> Option<&Channel> {
        self.channels.iter().find(|c| c.spin == spin)
    }
}

/// Free induction decay of `rho` observed on `spins` in `frame`.
///
/// The caller applies any read-out pulses first. Each coherence evolves under
/// the frame Hamiltonian and decays with the observed spin's T₂; the receiver
/// phase follows [`receiver_phases`].
pub fn simulate_fid(rho: &DensityMatrix, sys: &SpinSystem, frame: &Frame, spins: &[usize], acq: &Acquisition) -> Result<Fid> {
    acq.validate()?;
    frame.check(sys)?;
    if rho.dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), actual: rho.dim() });
    }
    let phases = receiver_phases(sys)?;
    let mut channels = Vec::with_capacity(spins.len());
    for &spin in spins {
        let lines = transition_lines(sys, frame, spin)?;
        if let Some(l) = lines.iter().find(|l| l.freq_hz.abs() > acq.nyquist_hz()) {
            return Err(Error::Nyquist { freq_hz: l.freq_hz, nyquist_hz: acq.nyquist_hz() });
        }
        let amps = line_amplitudes(rho, &lines, phases[spin]);
        channels.push(Channel { spin, samples: synthesize(&lines, &amps, acq) });
    }
    Ok(Fid { dt: acq.dt, frame: frame.clone(), channels })
}

/// `Σ a_l exp((i2πf_l − 1/T₂)t)` sampled on the acquisition grid.
pub fn synthesize(lines: &[Line], amps: &[Complex64], acq: &Acquisition) -> Vec<Complex64> {
    let n = acq.samples();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (l, &a) in lines.iter().zip(amps) {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        // advance by a fixed per-sample factor, re-anchored periodically
        let step = Complex64::new(-l.decay_rate * acq.dt, TAU * l.freq_hz * acq.dt).exp();
        let mut z = a;
        for (k, s) in out.iter_mut().enumerate() {
            if k % 256 == 0 {
                let t = k as f64 * acq.dt;
                z = a * Complex64::new(-l.decay_rate * t, TAU * l.freq_hz * t).exp();
            }
            *s += z;
            z *= step;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::uncoupling_offsets;
    use crate::spin::{build_hamiltonian, dephase, evolve, Operator, SpinOp};

    #[test]
    fn receiver_phase_is_zero_for_y_readout() {
        let sys = SpinSystem::bromotrifluoroethylene();
        for p in receiver_phases(&sys).unwrap() {
            assert!(p.abs() < 1e-15);
        }
    }

    #[test]
    fn lines_in_uncoupling_frame() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let frame = uncoupling_offsets(&sys, 0).unwrap();
        let lines = transition_lines(&sys, &frame, 1).unwrap();
        // |0⟩_A, C = 0 then C = 1
        assert!((lines[0].freq_hz + 26.9).abs() < 1e-10);
        assert!((lines[1].freq_hz - 26.9).abs() < 1e-10);
    }

    #[test]
    fn fid_matches_direct_evolution() {
        let sys = SpinSystem::bromotrifluoroethylene().with_t2(vec![4.0, 5.0, 7.0]).unwrap();
        let frame = uncoupling_offsets(&sys, 0).unwrap();
        let rho0 = crate::spin::thermal_state(&sys, &crate::spin::Polarization::Homonuclear(0.1)).unwrap();
        let rho0 = rho0.transformed(&readout_unitary(&sys, &[0, 1, 2], Axis::Y).unwrap());
        let acq = Acquisition::new(0.6, 1e-3).unwrap();
        let fid = simulate_fid(&rho0, &sys, &frame, &[1], &acq).unwrap();
        let h = build_hamiltonian(&sys, &frame).unwrap();
        let minus = Operator::single_spin(3, 1, SpinOp::Minus);
        for k in [0usize, 17, 333, 599] {
            let t = k as f64 * 1e-3;
            let rho = dephase(&evolve(&rho0, &h, t).unwrap(), &sys, t).unwrap();
            let want = rho.expectation(&minus);
            assert!((fid.channels[0].samples[k] - want).norm() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn identity_gives_no_signal() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let fid = simulate_fid(&DensityMatrix::maximally_mixed(3), &sys, &Frame::resonant(3), &[0, 1, 2], &Acquisition::default())
            .unwrap();
        assert!(fid.channels.iter().all(|c| c.samples.iter().all(|s| s.norm() == 0.0)));
    }

    #[test]
    fn nyquist_is_enforced() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let acq = Acquisition::new(1.0, 0.02).unwrap();
        let err = simulate_fid(&DensityMatrix::maximally_mixed(3), &sys, &Frame::resonant(3), &[1], &acq);
        assert!(matches!(err, Err(Error::Nyquist { .. })));
    }

    #[test]
    fn bad_acquisition() {
        assert!(Acquisition::new(1e-3, 1e-3).is_err());
        assert!(Acquisition::new(1.0, 0.0).is_err());
    }
}
