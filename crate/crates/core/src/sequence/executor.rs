use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::Result;
use crate::pulse::{calibrate_amplitude, simultaneous_pulse_propagator, Envelope, Frame, IntegratorSettings, ShapedPulse};
use crate::sequence::{PulseSequence, PulseSpec, SequenceEvent};
use crate::spin::{dephase_in_place, hamiltonian_diagonal, DensityMatrix, Operator, SpinSystem};

/// How pulse events are turned into propagators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseMode {
    /// Instantaneous rotations.
    Ideal,
    /// Finite pulses integrated together with the coupled free evolution.
    Shaped { envelope: Envelope, duration: f64 },
}

impl PulseMode {
    /// Gaussian 300 µs pulses truncated at 3σ.
    pub fn shaped_default() -> Self {
        PulseMode::Shaped { envelope: Envelope::default(), duration: 300e-6 }
    }

    pub fn pulse_duration(&self) -> f64 {
        match self {
            PulseMode::Ideal => 0.0,
            PulseMode::Shaped { duration, .. } => *duration,
        }
    }
}

/// Systematic pulse imperfections applied to every pulse.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorModel {
    /// Relative flip-angle error ε: every angle is scaled by `1 + ε`.
    pub flip_error: f64,
    /// Added to every RF phase, radians.
    pub phase_offset: f64,
}

impl ErrorModel {
    pub fn is_zero(&self) -> bool {
        self.flip_error == 0.0 && self.phase_offset == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub mode: PulseMode,
    pub errors: ErrorModel,
    /// Apply T₂ dephasing during delays and pulses.
    pub dephasing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions::ideal()
    }
}

impl RunOptions {
    pub fn ideal() -> Self {
        RunOptions { mode: PulseMode::Ideal, errors: ErrorModel::default(), dephasing: false }
    }

    pub fn with_errors(mut self, errors: ErrorModel) -> Self {
        self.errors = errors;
        self
    }

    pub fn with_dephasing(mut self, on: bool) -> Self {
        self.dephasing = on;
        self
    }

    pub fn with_mode(mut self, mode: PulseMode) -> Self {
        self.mode = mode;
        self
    }
}

type CacheKey = Vec<u64>;

/// Executes pulse sequences on density matrices.
///
/// Shaped-pulse propagators are expensive, so they are cached per frame and
/// pulse set; the cache is shared between threads.
#[derive(Debug)]
pub struct Simulator {
    sys: SpinSystem,
    options: RunOptions,
    /// Calibrated peak amplitude per radian of flip angle, Hz.
    hz_per_rad: f64,
    cache: Mutex<HashMap<CacheKey, Arc<Operator>>>,
}

impl Simulator {
    pub fn new(sys: &SpinSystem, options: RunOptions) -> Result<Self> {
        sys.validate()?;
        let hz_per_rad = match options.mode {
            PulseMode::Ideal => 0.0,
            PulseMode::Shaped { envelope, duration } => {
                let template = ShapedPulse::new(0, envelope, duration, PI / 2.0, 0.0);
                calibrate_amplitude(sys, &template, PI / 2.0)? / (PI / 2.0)
            }
        };
        Ok(Simulator { sys: sys.clone(), options, hz_per_rad, cache: Mutex::new(HashMap::new()) })
    }

    pub fn ideal(sys: &SpinSystem) -> Result<Self> {
        Self::new(sys, RunOptions::ideal())
    }

    pub fn system(&self) -> &SpinSystem {
        &self.sys
    }

    pub fn options(&self) -> &RunOptions {
        &self.options
    }

    /// Calibrated 90° peak amplitude in Hz (zero for ideal pulses).
    pub fn calibrated_90_hz(&self) -> f64 {
        self.hz_per_rad * PI / 2.0
    }

    /// Wall-clock length of `seq` under this simulator's pulse mode.
    pub fn duration(&self, seq: &PulseSequence) -> f64 {
        seq.duration(self.options.mode.pulse_duration())
    }

    /// Propagator of one pulse event in `frame`, including pulse errors.
    pub fn pulse_unitary(&self, frame: &Frame, specs: &[PulseSpec]) -> Result<Arc<Operator>> {
        let n = self.sys.n();
        let err = self.options.errors;
        match self.options.mode {
            PulseMode::Ideal => {
                let mut u = Operator::identity(self.sys.dim());
                for p in specs {
                    let phase = p.axis.phase() + err.phase_offset;
                    u = &crate::spin::rotation_with_phase(n, p.spin, phase, p.angle * (1.0 + err.flip_error))? * &u;
                }
                Ok(Arc::new(u))
            }
            PulseMode::Shaped { envelope, duration } => {
                let key = self.cache_key(frame, specs);
                if let Some(u) = self.cache.lock().expect("cache poisoned").get(&key) {
                    return Ok(Arc::clone(u));
                }
                let u = Arc::new(self.shaped_unitary(frame, specs, envelope, duration)?);
                self.cache.lock().expect("cache poisoned").insert(key, Arc::clone(&u));
                Ok(u)
            }
        }
    }

    fn shaped_unitary(&self, frame: &Frame, specs: &[PulseSpec], envelope: Envelope, duration: f64) -> Result<Operator> {
        let err = self.options.errors;
        let pulses: Vec<ShapedPulse> = specs
            .iter()
            .map(|p| p.canonical())
            .filter(|p| p.angle > 0.0)
            .map(|p| {
                let amp = self.hz_per_rad * p.angle * (1.0 + err.flip_error);
                ShapedPulse::new(p.spin, envelope, duration, p.angle, p.axis.phase() + err.phase_offset)
                    .with_amplitude_hz(amp)
            })
            .collect();
        if pulses.is_empty() {
            return crate::spin::build_hamiltonian(&self.sys, frame)?.propagator(duration);
        }
        Ok(simultaneous_pulse_propagator(&self.sys, frame, &pulses, &IntegratorSettings::default())?.unitary)
    }

    fn cache_key(&self, frame: &Frame, specs: &[PulseSpec]) -> CacheKey {
        let mut key: Vec<u64> = frame.offsets_hz().iter().map(|d| d.to_bits()).collect();
        for p in specs {
            let c = p.canonical();
            key.extend([c.spin as u64, c.axis as u64, c.angle.to_bits()]);
        }
        key
    }

    /// Runs `seq` on `rho`, starting in the sequence's initial frame.
    pub fn run(&self, rho: &DensityMatrix, seq: &PulseSequence) -> Result<DensityMatrix> {
        Ok(self.run_to_end(rho, seq)?.0)
    }

    /// Like [`Simulator::run`], also returning the frame in effect at the end.
    pub fn run_to_end(&self, rho: &DensityMatrix, seq: &PulseSequence) -> Result<(DensityMatrix, Frame)> {
        seq.validate(&self.sys)?;
        if rho.dim() != self.sys.dim() {
            return Err(crate::Error::DimensionMismatch { expected: self.sys.dim(), actual: rho.dim() });
        }
        let mut frame = seq.initial_frame.clone();
        let mut diag = hamiltonian_diagonal(&self.sys, &frame)?;
        let mut state = rho.clone();
        let dur = self.options.mode.pulse_duration();
        for event in &seq.events {
            match event {
                SequenceEvent::Pulse(specs) => {
                    let u = self.pulse_unitary(&frame, specs)?;
                    state = state.transformed(&u);
                    if self.options.dephasing && dur > 0.0 {
                        dephase_in_place(&mut state, &self.sys, dur);
                    }
                }
                SequenceEvent::Delay(t) => {
                    free_evolve(&mut state, &diag, *t);
                    if self.options.dephasing {
                        dephase_in_place(&mut state, &self.sys, *t);
                    }
                }
                SequenceEvent::FrameShift(f) => {
                    frame = f.clone();
                    diag = hamiltonian_diagonal(&self.sys, &frame)?;
                }
            }
        }
        Ok((state, frame))
    }

    /// Overall propagator of `seq`, ignoring dephasing.
    pub fn unitary(&self, seq: &PulseSequence) -> Result<Operator> {
        seq.validate(&self.sys)?;
        let mut frame = seq.initial_frame.clone();
        let mut diag = hamiltonian_diagonal(&self.sys, &frame)?;
        let mut u = Operator::identity(self.sys.dim());
        for event in &seq.events {
            match event {
                SequenceEvent::Pulse(specs) => u = &*self.pulse_unitary(&frame, specs)? * &u,
                SequenceEvent::Delay(t) => {
                    let phases: Vec<Complex64> = diag.iter().map(|e| Complex64::from_polar(1.0, -e * t)).collect();
                    u = &Operator::from_diagonal(&phases) * &u;
                }
                SequenceEvent::FrameShift(f) => {
                    frame = f.clone();
                    diag = hamiltonian_diagonal(&self.sys, &frame)?;
                }
            }
        }
        Ok(u)
    }
}

/// `ρ_rc ← ρ_rc e^{−i(E_r − E_c)t}` for a diagonal Hamiltonian.
fn free_evolve(rho: &mut DensityMatrix, diag: &[f64], t: f64) {
    if t == 0.0 {
        return;
    }
    let m = rho.matrix_mut();
    let d = diag.len();
    for c in 0..d {
        for r in 0..d {
            if r != c {
                m[(r, c)] *= Complex64::from_polar(1.0, -(diag[r] - diag[c]) * t);
            }
        }
    }
}
