use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::pulse::Frame;
use crate::sequence::{PulseSequence, PulseSpec};
use crate::spin::{Axis, SpinSystem};

/// The four equivalent three-pulse realizations of a ẑ rotation.
///
/// Written in time order; each variant applies a pre pulse, a rotation by the
/// requested angle about the middle axis and the inverse of the pre pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ZVariant {
    /// Y X Ȳ
    #[default]
    YXYbar,
    /// Ȳ X̄ Y
    YbarXbarY,
    /// X Ȳ X̄
    XYbarXbar,
    /// X̄ Y X
    XbarYX,
}

impl ZVariant {
    pub const ALL: [ZVariant; 4] = [ZVariant::YXYbar, ZVariant::YbarXbarY, ZVariant::XYbarXbar, ZVariant::XbarYX];

    /// (pre axis, middle axis); the post pulse is the pre pulse reversed.
    pub fn axes(self) -> (Axis, Axis) {
        match self {
            ZVariant::YXYbar => (Axis::Y, Axis::X),
            ZVariant::YbarXbarY => (Axis::MinusY, Axis::MinusX),
            ZVariant::XYbarXbar => (Axis::X, Axis::MinusY),
            ZVariant::XbarYX => (Axis::MinusX, Axis::Y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ZVariant::YXYbar => "YXȲ",
            ZVariant::YbarXbarY => "ȲX̄Y",
            ZVariant::XYbarXbar => "XȲX̄",
            ZVariant::XbarYX => "X̄YX",
        }
    }
}

impl std::fmt::Display for ZVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Appends simultaneous composite ẑ rotations `R_z(angle)` on each listed spin.
pub fn push_composite_z(seq: &mut PulseSequence, rotations: &[(usize, f64)], variant: ZVariant) {
    let (pre, mid) = variant.axes();
    let active: Vec<(usize, f64)> = rotations.iter().copied().filter(|&(_, a)| a != 0.0).collect();
    if active.is_empty() {
        return;
    }
    seq.simultaneous(active.iter().map(|&(s, _)| PulseSpec::new(s, pre, PI / 2.0)).collect());
    seq.simultaneous(active.iter().map(|&(s, a)| PulseSpec::new(s, mid, a)).collect());
    seq.simultaneous(active.iter().map(|&(s, _)| PulseSpec::new(s, pre, -PI / 2.0)).collect());
}

/// All four composite realizations of a ẑ rotation by `angle` on `spin`.
pub fn composite_z_variants(sys: &SpinSystem, spin: usize, angle: f64) -> Result<Vec<PulseSequence>> {
    sys.check_spin(spin)?;
    Ok(ZVariant::ALL
        .iter()
        .map(|&v| {
            let mut seq = PulseSequence::new(format!("z({}) {v}", sys.label(spin)), Frame::resonant(sys.n()));
            push_composite_z(&mut seq, &[(spin, angle)], v);
            seq
        })
        .collect())
}

/// Treatment of spins other than control and target during a CNOT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectatorMode {
    /// Refocus every spectator with a pair of 180° pulses.
    Refocus,
    /// `spin` is known to be in `|value⟩`; its coupling to the target is
    /// compensated instead of refocused. Other spectators are refocused.
    Labeled { spin: usize, value: u8 },
}

/// CNOT flipping `target` iff `control` is `|1⟩`, in the resonant frame with
/// all spectators refocused. Correct up to a diagonal phase matrix.
pub fn cnot_sequence(sys: &SpinSystem, control: usize, target: usize) -> Result<PulseSequence> {
    cnot_sequence_with(sys, &Frame::resonant(sys.n()), control, target, SpectatorMode::Refocus, ZVariant::default())
}

/// CNOT in an arbitrary frame.
///
/// Ȳ on the target, free evolution for `1/(2|J|)` (spectators refocused
/// half way), a composite ẑ rotation cancelling the target's unconditional
/// phase, and Y on the target.
pub fn cnot_sequence_with(
    sys: &SpinSystem,
    frame: &Frame,
    control: usize,
    target: usize,
    spectators: SpectatorMode,
    variant: ZVariant,
) -> Result<PulseSequence> {
    sys.check_spin(control)?;
    sys.check_spin(target)?;
    frame.check(sys)?;
    if control == target {
        return Err(Error::InvalidSequence("control and target coincide".into()));
    }
    let j = sys.coupling_hz(control, target);
    if j == 0.0 {
        return Err(Error::ZeroCoupling(sys.label(control).into(), sys.label(target).into()));
    }
    let labeled = match spectators {
        SpectatorMode::Refocus => None,
        SpectatorMode::Labeled { spin, value } => {
            sys.check_spin(spin)?;
            if spin == control || spin == target || value > 1 {
                return Err(Error::InvalidSequence(format!("bad labeled spectator {spin}={value}")));
            }
            Some((spin, value))
        }
    };
    let refocused: Vec<usize> = (0..sys.n())
        .filter(|&s| s != control && s != target && labeled.is_none_or(|(l, _)| l != s))
        .collect();

    let t = 1.0 / (2.0 * j.abs());
    // Unconditional ẑ phase picked up by the target during `t`.
    let mut phase = 2.0 * PI * frame.offset_hz(target) * t;
    if let Some((l, value)) = labeled {
        let m = if value == 0 { 0.5 } else { -0.5 };
        phase += 2.0 * PI * sys.coupling_hz(l, target) * m * t;
    }
    let correction = -(phase + j.signum() * PI / 2.0);

    let name = format!("CNOT {}→{}", sys.label(control), sys.label(target));
    let mut seq = PulseSequence::new(name, frame.clone());
    seq.pulse(target, Axis::MinusY, PI / 2.0);
    if refocused.is_empty() {
        seq.delay(t);
    } else {
        seq.delay(t / 2.0).pulses(&refocused, Axis::X, PI).delay(t / 2.0).pulses(&refocused, Axis::X, PI);
    }
    let correction = wrap_angle(correction);
    push_composite_z(&mut seq, &[(target, correction)], variant);
    seq.pulse(target, Axis::Y, PI / 2.0);
    Ok(seq)
}

/// Maps an angle into `(−π, π]`.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}
