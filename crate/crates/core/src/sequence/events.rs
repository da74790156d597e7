use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::pulse::Frame;
use crate::spin::{rotation_with_phase, Axis, Operator, SpinSystem};

/// One rotation on one spin. Negative angles rotate about the opposite axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub spin: usize,
    pub axis: Axis,
    /// Radians.
    pub angle: f64,
}

impl PulseSpec {
    pub fn new(spin: usize, axis: Axis, angle: f64) -> Self {
        PulseSpec { spin, axis, angle }
    }

    /// Same rotation with a non-negative angle.
    pub fn canonical(&self) -> PulseSpec {
        if self.angle < 0.0 {
            PulseSpec { spin: self.spin, axis: self.axis.negated(), angle: -self.angle }
        } else {
            *self
        }
    }

    pub fn unitary(&self, n: usize) -> Result<Operator> {
        rotation_with_phase(n, self.spin, self.axis.phase(), self.angle)
    }

    pub fn inverse(&self) -> PulseSpec {
        PulseSpec { angle: -self.angle, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceEvent {
    /// Pulses on distinct spins applied together.
    Pulse(Vec<PulseSpec>),
    /// Free evolution, seconds.
    Delay(f64),
    /// Switch to another rotating frame. Takes no time; the density matrix is
    /// carried over unchanged, so the new frame is phase-aligned with the old
    /// one at the instant of the switch.
    FrameShift(Frame),
}

/// An ordered timeline of pulses, delays and frame changes.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub name: String,
    /// Frame in effect before the first event.
    pub initial_frame: Frame,
    pub events: Vec<SequenceEvent>,
}

impl PulseSequence {
    pub fn new(name: impl Into<String>, initial_frame: Frame) -> Self {
        PulseSequence { name: name.into(), initial_frame, events: Vec::new() }
    }

    pub fn pulse(&mut self, spin: usize, axis: Axis, angle: f64) -> &mut Self {
        self.events.push(SequenceEvent::Pulse(vec![PulseSpec::new(spin, axis, angle)]));
        self
    }

    /// The same rotation on several spins at once.
    pub fn pulses(&mut self, spins: &[usize], axis: Axis, angle: f64) -> &mut Self {
        self.events.push(SequenceEvent::Pulse(spins.iter().map(|&s| PulseSpec::new(s, axis, angle)).collect()));
        self
    }

    pub fn simultaneous(&mut self, specs: Vec<PulseSpec>) -> &mut Self {
        self.events.push(SequenceEvent::Pulse(specs));
        self
    }

    pub fn delay(&mut self, seconds: f64) -> &mut Self {
        self.events.push(SequenceEvent::Delay(seconds));
        self
    }

    pub fn frame_shift(&mut self, frame: Frame) -> &mut Self {
        self.events.push(SequenceEvent::FrameShift(frame));
        self
    }

    /// Appends `other`, inserting a frame shift when its initial frame differs
    /// from the frame at the end of `self`.
    pub fn append(&mut self, other: &PulseSequence) -> &mut Self {
        if self.final_frame() != other.initial_frame {
            self.events.push(SequenceEvent::FrameShift(other.initial_frame.clone()));
        }
        self.events.extend(other.events.iter().cloned());
        self
    }

    pub fn final_frame(&self) -> Frame {
        self.events
            .iter()
            .rev()
            .find_map(|e| match e {
                SequenceEvent::FrameShift(f) => Some(f.clone()),
                _ => None,
            })
            .unwrap_or_else(|| self.initial_frame.clone())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Individual single-spin pulses.
    pub fn pulse_count(&self) -> usize {
        self.events
            .iter()
            .map(|e| match e {
                SequenceEvent::Pulse(p) => p.len(),
                _ => 0,
            })
            .sum()
    }

    pub fn pulse_event_count(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, SequenceEvent::Pulse(_))).count()
    }

    pub fn total_delay(&self) -> f64 {
        self.events
            .iter()
            .map(|e| match e {
                SequenceEvent::Delay(t) => *t,
                _ => 0.0,
            })
            .sum()
    }

    /// Wall-clock length when every pulse event lasts `pulse_duration`.
    pub fn duration(&self, pulse_duration: f64) -> f64 {
        self.total_delay() + pulse_duration * self.pulse_event_count() as f64
    }

    pub fn validate(&self, sys: &SpinSystem) -> Result<()> {
        self.initial_frame.check(sys)?;
        for (k, event) in self.events.iter().enumerate() {
            match event {
                SequenceEvent::Pulse(specs) => {
                    if specs.is_empty() {
                        return Err(Error::InvalidSequence(format!("event {k}: empty pulse")));
                    }
                    for (i, p) in specs.iter().enumerate() {
                        sys.check_spin(p.spin)?;
                        if !p.angle.is_finite() || p.angle.abs() > 2.0 * PI + 1e-12 {
                            return Err(Error::InvalidSequence(format!("event {k}: angle {} rad", p.angle)));
                        }
                        if specs[..i].iter().any(|q| q.spin == p.spin) {
                            return Err(Error::InvalidSequence(format!(
                                "event {k}: two pulses on spin {}",
                                sys.label(p.spin)
                            )));
                        }
                    }
                }
                SequenceEvent::Delay(t) => {
                    if !t.is_finite() {
                        return Err(Error::InvalidSequence(format!("event {k}: delay {t}")));
                    }
                    if *t < 0.0 {
                        return Err(Error::NegativeDuration(*t));
                    }
                }
                SequenceEvent::FrameShift(f) => f.check(sys)?,
            }
        }
        Ok(())
    }
}
