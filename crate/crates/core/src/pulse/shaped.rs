use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulse::Frame;
use crate::spin::operator::{expm_i_hermitian, max_abs};
use crate::spin::{hamiltonian_diagonal, Operator, SpinSystem};
use crate::CMatrix;

/// Amplitude envelope of a shaped pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Rectangular,
    /// Gaussian centred in the pulse window, cut off `truncation` standard
    /// deviations either side of the centre (`σ = duration / (2·truncation)`).
    Gaussian { truncation: f64 },
}

impl Default for Envelope {
    fn default() -> Self {
        Envelope::Gaussian { truncation: 3.0 }
    }
}

impl Envelope {
    /// Relative amplitude at time `t` into a pulse of length `duration`.
    pub fn value(&self, t: f64, duration: f64) -> f64 {
        if !(0.0..=duration).contains(&t) {
            return 0.0;
        }
        match *self {
            Envelope::Rectangular => 1.0,
            Envelope::Gaussian { truncation } => {
                let sigma = duration / (2.0 * truncation);
                let x = (t - duration / 2.0) / sigma;
                (-0.5 * x * x).exp()
            }
        }
    }

    /// `∫ envelope dt / duration` by composite Simpson quadrature.
    pub fn normalized_area(&self) -> f64 {
        match self {
            Envelope::Rectangular => 1.0,
            Envelope::Gaussian { .. } => {
                let n = 4096;
                let h = 1.0 / n as f64;
                let mut s = self.value(0.0, 1.0) + self.value(1.0, 1.0);
                for k in 1..n {
                    let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                    s += w * self.value(k as f64 * h, 1.0);
                }
                s * h / 3.0
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Envelope::Rectangular => Ok(()),
            Envelope::Gaussian { truncation } if truncation > 0.0 && truncation.is_finite() => Ok(()),
            Envelope::Gaussian { truncation } => Err(Error::InvalidPulse(format!("gaussian truncation {truncation}"))),
        }
    }
}

/// A finite-duration RF pulse on one spin.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapedPulse {
    pub spin: usize,
    pub envelope: Envelope,
    /// Seconds.
    pub duration: f64,
    /// Nominal on-resonance rotation angle, radians.
    pub flip_angle: f64,
    /// RF phase, radians; 0 rotates about +x, π/2 about +y.
    pub phase: f64,
    /// Carrier placement relative to the target spin's frame frequency, Hz.
    pub carrier_offset_hz: f64,
    /// Peak ω₁/2π in Hz. `None` derives it from the area theorem.
    pub peak_amplitude_hz: Option<f64>,
}

impl ShapedPulse {
    pub fn new(spin: usize, envelope: Envelope, duration: f64, flip_angle: f64, phase: f64) -> Self {
        ShapedPulse { spin, envelope, duration, flip_angle, phase, carrier_offset_hz: 0.0, peak_amplitude_hz: None }
    }

    pub fn with_amplitude_hz(mut self, hz: f64) -> Self {
        self.peak_amplitude_hz = Some(hz);
        self
    }

    /// Peak amplitude ω₁/2π satisfying `∫ω₁(t)dt = flip_angle` unless set explicitly.
    pub fn peak_amplitude_hz(&self) -> f64 {
        self.peak_amplitude_hz
            .unwrap_or_else(|| self.flip_angle / (TAU * self.duration * self.envelope.normalized_area()))
    }

    pub fn validate(&self, sys: &SpinSystem) -> Result<()> {
        sys.check_spin(self.spin)?;
        self.envelope.validate()?;
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidPulse(format!("duration {} must be positive", self.duration)));
        }
        if !(self.flip_angle > 0.0 && self.flip_angle <= TAU + 1e-12) {
            return Err(Error::InvalidPulse(format!("flip angle {} outside (0, 2π]", self.flip_angle)));
        }
        if !self.phase.is_finite() || !self.carrier_offset_hz.is_finite() {
            return Err(Error::InvalidPulse("phase and carrier offset must be finite".into()));
        }
        if let Some(a) = self.peak_amplitude_hz {
            if !a.is_finite() {
                return Err(Error::InvalidPulse(format!("amplitude {a}")));
            }
        }
        Ok(())
    }
}

/// Step-doubling controls for the pulse integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    pub initial_slices: usize,
    /// Stop once doubling the slice count moves the propagator by less than
    /// this in max-norm.
    pub tolerance: f64,
    pub max_slices: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings { initial_slices: 64, tolerance: 1e-8, max_slices: 1 << 17 }
    }
}

/// Result of integrating a pulse.
#[derive(Debug, Clone)]
pub struct PulsePropagation {
    pub unitary: Operator,
    pub slices: usize,
    /// Max-norm change of the last doubling.
    pub last_change: f64,
    pub duration: f64,
}

/// Propagator of a single shaped pulse in `frame`.
pub fn pulse_propagator(sys: &SpinSystem, frame: &Frame, pulse: &ShapedPulse) -> Result<Operator> {
    Ok(simultaneous_pulse_propagator(sys, frame, std::slice::from_ref(pulse), &IntegratorSettings::default())?.unitary)
}

/// Propagator of several pulses on distinct spins played together.
///
/// Each RF field is applied to every spin. In the rotating-wave picture a
/// spin `j` sees pulse `p` rotate at `ν_j − ν_RF`, where `ν_j` is the frame
/// frequency of `j` and `ν_RF` the pulse carrier. Shorter pulses are centred
/// in the window of the longest. The frame Hamiltonian (offsets and
/// couplings) acts throughout.
pub fn simultaneous_pulse_propagator(
    sys: &SpinSystem,
    frame: &Frame,
    pulses: &[ShapedPulse],
    settings: &IntegratorSettings,
) -> Result<PulsePropagation> {
    frame.check(sys)?;
    if pulses.is_empty() {
        return Err(Error::InvalidPulse("no pulses".into()));
    }
    for (k, p) in pulses.iter().enumerate() {
        p.validate(sys)?;
        if pulses[..k].iter().any(|q| q.spin == p.spin) {
            return Err(Error::InvalidPulse(format!("two pulses on spin {}", sys.label(p.spin))));
        }
    }
    let total = pulses.iter().map(|p| p.duration).fold(0.0, f64::max);
    let model = PulseModel::new(sys, frame, pulses, total)?;

    let mut slices = settings.initial_slices.max(1);
    let mut prev = model.integrate(slices);
    loop {
        let next_slices = slices * 2;
        if next_slices > settings.max_slices {
            let change = max_abs(&(model.integrate(slices).matrix() - prev.matrix()));
            return Err(Error::NonConvergent { slices, change });
        }
        let next = model.integrate(next_slices);
        let change = max_abs(&(next.matrix() - prev.matrix()));
        if change < settings.tolerance {
            let unitary = nearest_unitary(next);
            return Ok(PulsePropagation { unitary, slices: next_slices, last_change: change, duration: total });
        }
        prev = next;
        slices = next_slices;
    }
}

struct RfTerm {
    start: f64,
    duration: f64,
    envelope: Envelope,
    /// rad/s
    peak: f64,
    phase: f64,
    /// Per spin: rotation rate of this field in that spin's frame, rad/s.
    rates: Vec<f64>,
}

struct PulseModel {
    n: usize,
    diag: Vec<f64>,
    rf: Vec<RfTerm>,
    total: f64,
}

impl PulseModel {
    fn new(sys: &SpinSystem, frame: &Frame, pulses: &[ShapedPulse], total: f64) -> Result<Self> {
        let diag = hamiltonian_diagonal(sys, frame)?;
        let rf = pulses
            .iter()
            .map(|p| {
                let carrier = frame.rotation_hz(sys, p.spin) + p.carrier_offset_hz;
                RfTerm {
                    start: (total - p.duration) / 2.0,
                    duration: p.duration,
                    envelope: p.envelope,
                    peak: TAU * p.peak_amplitude_hz(),
                    phase: p.phase,
                    rates: (0..sys.n()).map(|j| TAU * (frame.rotation_hz(sys, j) - carrier)).collect(),
                }
            })
            .collect();
        Ok(PulseModel { n: sys.n(), diag, rf, total })
    }

    fn hamiltonian(&self, t: f64) -> CMatrix {
        let d = self.diag.len();
        let mut h = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, self.diag.iter().map(|&e| Complex64::new(e, 0.0))));
        for term in &self.rf {
            let w = term.peak * term.envelope.value(t - term.start, term.duration);
            if w == 0.0 {
                continue;
            }
            for j in 0..self.n {
                let bit = 1usize << (self.n - 1 - j);
                let theta = term.phase + term.rates[j] * t;
                // ½ω₁ e^{−iθ} on ⟨…0…|H|…1…⟩
                let upper = Complex64::from_polar(0.5 * w, -theta);
                for r in (0..d).filter(|r| r & bit == 0) {
                    h[(r, r | bit)] += upper;
                    h[(r | bit, r)] += upper.conj();
                }
            }
        }
        h
    }

    /// Fourth-order Magnus (two-point Gauss) product over `slices` steps.
    fn integrate(&self, slices: usize) -> Operator {
        let h = self.total / slices as f64;
        let c = 3f64.sqrt() / 6.0;
        let comm_coeff = Complex64::new(0.0, -(3f64.sqrt() / 12.0) * h * h);
        let d = self.diag.len();
        let mut u = CMatrix::identity(d, d);
        for k in 0..slices {
            let t0 = k as f64 * h;
            let h1 = self.hamiltonian(t0 + (0.5 - c) * h);
            let h2 = self.hamiltonian(t0 + (0.5 + c) * h);
            let comm = &h2 * &h1 - &h1 * &h2;
            let k_eff = (&h1 + &h2) * Complex64::new(h / 2.0, 0.0) + comm * comm_coeff;
            u = expm_i_hermitian(&k_eff, 1.0) * u;
        }
        Operator::from_matrix(u).expect("square")
    }
}

/// Polar projection `W V†` of `U = W Σ V†`, removing rounding drift
/// accumulated over many slice products.
fn nearest_unitary(u: Operator) -> Operator {
    let svd = u.into_matrix().svd(true, true);
    let w = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    Operator::from_matrix(w * v_t).expect("square")
}

/// Rotation angle of a 2×2 unitary with unit determinant, in `[0, 2π]`.
pub fn su2_rotation_angle(u: &Operator) -> f64 {
    let half = (u.matrix().trace().re / 2.0).clamp(-1.0, 1.0);
    2.0 * half.acos()
}

/// Peak amplitude ω₁/2π (Hz) that makes `template` rotate an isolated,
/// on-resonance copy of its target spin by `target_angle`.
///
/// Starts from the area theorem and refines with a bracketed secant search on
/// the simulated flip angle.
pub fn calibrate_amplitude(sys: &SpinSystem, template: &ShapedPulse, target_angle: f64) -> Result<f64> {
    sys.check_spin(template.spin)?;
    if !(target_angle > 0.0 && target_angle <= PI) {
        return Err(Error::InvalidPulse(format!("target angle {target_angle} outside (0, π]")));
    }
    let single = SpinSystem::new(vec!["S".into()], vec![0.0], &[], vec![f64::INFINITY])?;
    let frame = Frame::resonant(1);
    let settings = IntegratorSettings { tolerance: 1e-11, ..IntegratorSettings::default() };
    let base = ShapedPulse {
        spin: 0,
        flip_angle: target_angle,
        carrier_offset_hz: 0.0,
        peak_amplitude_hz: None,
        ..template.clone()
    };
    base.validate(&single)?;
    let residual = |amp: f64| -> Result<f64> {
        let p = base.clone().with_amplitude_hz(amp);
        let u = simultaneous_pulse_propagator(&single, &frame, &[p], &settings)?.unitary;
        Ok(su2_rotation_angle(&u) - target_angle)
    };

    let guess = base.peak_amplitude_hz();
    let (mut lo, mut hi) = (guess * 0.95, guess * 1.05);
    let (mut f_lo, mut f_hi) = (residual(lo)?, residual(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { guess_hz: guess });
    }
    // Illinois variant of regula falsi.
    let mut side = 0i8;
    for _ in 0..100 {
        let x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let fx = residual(x)?;
        if fx.abs() < 1e-10 || (hi - lo).abs() < 1e-12 * guess {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi /= 2.0;
            }
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if side == 1 {
                f_lo /= 2.0;
            }
            side = 1;
        }
    }
    Ok((lo + hi) / 2.0)
}
