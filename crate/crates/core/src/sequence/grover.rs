use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulse::{uncoupling_offsets, Frame};
use crate::sequence::{labeling_sequence, push_composite_z, PulseSequence, Simulator, ZVariant};
use crate::spin::{phase_aligned_distance, subspace_block, thermal_state, Axis, DensityMatrix, Polarization, SpinSystem};
use crate::CMatrix;

const B: usize = 1;
const C: usize = 2;

/// Marked item of the 2-qubit search, `x0 = 2·b + c` for `|b c⟩` on spins B, C.
pub fn parse_x0(text: &str) -> Result<u8> {
    match text {
        "00" => Ok(0),
        "01" => Ok(1),
        "10" => Ok(2),
        "11" => Ok(3),
        _ => Err(Error::InvalidSequence(format!("x0 must be one of 00, 01, 10, 11, got '{text}'"))),
    }
}

pub fn x0_label(x0: u8) -> String {
    format!("{:02b}", x0)
}

fn check_x0(x0: u8) -> Result<()> {
    if x0 > 3 {
        return Err(Error::InvalidSequence(format!("x0 index {x0} out of range")));
    }
    Ok(())
}

fn bc_coupling(sys: &SpinSystem) -> Result<f64> {
    if sys.n() != 3 {
        return Err(Error::InvalidSystem(format!("Grover search needs 3 spins, got {}", sys.n())));
    }
    let j = sys.coupling_hz(B, C);
    if j == 0.0 {
        return Err(Error::ZeroCoupling(sys.label(B).into(), sys.label(C).into()));
    }
    Ok(j)
}

/// Conditional phase flip on `|x0⟩` in the `|0⟩_A` subspace.
///
/// ẑ rotations Φ on B and Θ on C followed by `1/(2|J_BC|)` of coupled
/// evolution. Φ is +90° when c = 0 and −90° otherwise; Θ likewise with b.
/// A negative coupling reverses both.
pub fn grover_oracle_sequence(sys: &SpinSystem, x0: u8, variant: ZVariant) -> Result<PulseSequence> {
    check_x0(x0)?;
    let j = bc_coupling(sys)?;
    let (b, c) = (x0 >> 1, x0 & 1);
    let sign = j.signum();
    let phi = if c == 0 { PI / 2.0 } else { -PI / 2.0 } * sign;
    let theta = if b == 0 { PI / 2.0 } else { -PI / 2.0 } * sign;
    let mut seq = PulseSequence::new(format!("oracle {}", x0_label(x0)), uncoupling_offsets(sys, 0)?);
    push_composite_z(&mut seq, &[(B, phi), (C, theta)], variant);
    seq.delay(1.0 / (2.0 * j.abs()));
    Ok(seq)
}

/// Inversion about the average: X_B X_C, Y_B Y_C, `1/(2|J_BC|)`, Ȳ_B Ȳ_C.
pub fn grover_inversion_sequence(sys: &SpinSystem) -> Result<PulseSequence> {
    let j = bc_coupling(sys)?;
    let mut seq = PulseSequence::new("inversion", uncoupling_offsets(sys, 0)?);
    let flip = if j > 0.0 { 1.0 } else { -1.0 };
    seq.pulses(&[B, C], Axis::X, flip * PI / 2.0)
        .pulses(&[B, C], Axis::Y, PI / 2.0)
        .delay(1.0 / (2.0 * j.abs()))
        .pulses(&[B, C], Axis::MinusY, PI / 2.0);
    Ok(seq)
}

/// One oracle call followed by one inversion.
pub fn grover_iteration_sequence(sys: &SpinSystem, x0: u8, variant: ZVariant) -> Result<PulseSequence> {
    let mut seq = grover_oracle_sequence(sys, x0, variant)?;
    seq.name = format!("grover iteration {}", x0_label(x0));
    seq.append(&grover_inversion_sequence(sys)?);
    Ok(seq)
}

/// Labeling in the resonant frame, switch to the uncoupling frame, and
/// Y_B Y_C to create the uniform superposition on `|0⟩_A`.
pub fn grover_preparation(sys: &SpinSystem) -> Result<PulseSequence> {
    let mut seq = labeling_sequence(sys)?;
    seq.name = "grover preparation".into();
    seq.append(&superposition_sequence(sys)?);
    Ok(seq)
}

/// Y_B Y_C in the uncoupling frame.
pub fn superposition_sequence(sys: &SpinSystem) -> Result<PulseSequence> {
    bc_coupling(sys)?;
    let mut seq = PulseSequence::new("superposition", uncoupling_offsets(sys, 0)?);
    seq.pulses(&[B, C], Axis::Y, PI / 2.0);
    Ok(seq)
}

/// Exact 4×4 iteration `(2|ψ⟩⟨ψ| − I)·O_x0` on the computation spins.
pub fn ideal_grover_iteration(x0: u8) -> CMatrix {
    let mut m = CMatrix::from_element(4, 4, Complex64::new(0.5, 0.0)) - CMatrix::identity(4, 4);
    for r in 0..4 {
        m[(r, x0 as usize)] = -m[(r, x0 as usize)];
    }
    m
}

fn zero_a_block(u: &CMatrix) -> CMatrix {
    CMatrix::from_fn(4, 4, |r, c| u[(r, c)])
}

/// The ẑ-rotation variant whose oracle, combined with the inversion, comes
/// closest to the ideal iteration under `sim`'s pulse model. Ties keep the
/// earlier variant.
pub fn select_z_variant(sim: &Simulator, x0: u8) -> Result<ZVariant> {
    let ideal = ideal_grover_iteration(x0);
    let mut best = (ZVariant::default(), f64::INFINITY);
    for v in ZVariant::ALL {
        let u = sim.unitary(&grover_iteration_sequence(sim.system(), x0, v)?)?;
        let d = phase_aligned_distance(&zero_a_block(u.matrix()), &ideal);
        if d < best.1 - 1e-12 {
            best = (v, d);
        }
    }
    Ok(best.0)
}

/// Initial polarization used by [`grover_run`]. Results are normalized by
/// the effective-pure weight, so the value only sets the overall scale.
pub const GROVER_POLARIZATION: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct GroverRun {
    pub x0: u8,
    pub variant: ZVariant,
    /// `population[k]`: probability of `|x0⟩` after `k` iterations, read from
    /// the `|0⟩_A` block and normalized by the effective-pure weight of the
    /// labeled state. Index 0 is the uniform superposition.
    pub population: Vec<f64>,
    pub final_state: DensityMatrix,
    pub final_frame: Frame,
    /// Effective-pure weight of the labeled `|0⟩_A` block.
    pub reference_weight: f64,
    /// Preparation plus all iterations, seconds.
    pub duration: f64,
    pub iteration_duration: f64,
    pub labeling_duration: f64,
    pub pulse_count: usize,
}

/// Labels a thermal state, prepares the uniform superposition, and runs
/// `iterations` Grover iterations, recording the `|x0⟩` probability after each.
///
/// `variant` selects the composite-ẑ realization; `None` picks the one that
/// best matches the ideal iteration under the simulator's error model.
pub fn grover_run(sim: &Simulator, x0: u8, iterations: usize, variant: Option<ZVariant>) -> Result<GroverRun> {
    check_x0(x0)?;
    let sys = sim.system();
    let variant = match variant {
        Some(v) => v,
        None => select_z_variant(sim, x0)?,
    };
    let rho = thermal_state(sys, &Polarization::Homonuclear(GROVER_POLARIZATION))?;
    let labeling = labeling_sequence(sys)?;
    let labeled = sim.run(&rho, &labeling)?;
    let reference_weight = subspace_block(&labeled, sys, 0, 0)?.effective_pure_weight();
    if reference_weight == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let superposition = superposition_sequence(sys)?;
    let iteration = grover_iteration_sequence(sys, x0, variant)?;
    let mut state = sim.run(&labeled, &superposition)?;

    let population_of = |rho: &DensityMatrix| -> Result<f64> {
        let block = subspace_block(rho, sys, 0, 0)?;
        let x = x0 as usize;
        Ok(0.25 + (block.block[(x, x)].re - block.trace / 4.0) / reference_weight)
    };
    let mut population = vec![population_of(&state)?];
    for _ in 0..iterations {
        state = sim.run(&state, &iteration)?;
        population.push(population_of(&state)?);
    }
    let iteration_duration = sim.duration(&iteration);
    Ok(GroverRun {
        x0,
        variant,
        population,
        final_state: state,
        final_frame: iteration.final_frame(),
        reference_weight,
        duration: sim.duration(&labeling) + sim.duration(&superposition) + iterations as f64 * iteration_duration,
        iteration_duration,
        labeling_duration: sim.duration(&labeling),
        pulse_count: labeling.pulse_count() + superposition.pulse_count() + iterations * iteration.pulse_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{Operator, SpinOp};

    fn sys() -> SpinSystem {
        SpinSystem::bromotrifluoroethylene()
    }

    #[test]
    fn oracle_marks_x0() {
        let sys = sys();
        let sim = Simulator::ideal(&sys).unwrap();
        for x0 in 0..4u8 {
            let u = sim.unitary(&grover_oracle_sequence(&sys, x0, ZVariant::default()).unwrap()).unwrap();
            let mut want = CMatrix::identity(4, 4);
            want[(x0 as usize, x0 as usize)] = Complex64::new(-1.0, 0.0);
            assert!(phase_aligned_distance(&zero_a_block(u.matrix()), &want) < 1e-12, "x0 = {x0}");
            let uu = &u * &u;
            assert!(phase_aligned_distance(&zero_a_block(uu.matrix()), &CMatrix::identity(4, 4)) < 1e-12);
        }
    }

    #[test]
    fn oracle_axes_follow_the_table() {
        use crate::sequence::SequenceEvent;
        let sys = sys();
        let mid = |x0| match &grover_oracle_sequence(&sys, x0, ZVariant::YXYbar).unwrap().events[1] {
            SequenceEvent::Pulse(p) => (p[0].canonical().axis, p[1].canonical().axis),
            _ => unreachable!(),
        };
        assert_eq!(mid(0), (Axis::X, Axis::X));
        assert_eq!(mid(1), (Axis::MinusX, Axis::X));
        assert_eq!(mid(2), (Axis::X, Axis::MinusX));
        assert_eq!(mid(3), (Axis::MinusX, Axis::MinusX));
    }

    #[test]
    fn inversion_about_average() {
        let sys = sys();
        let sim = Simulator::ideal(&sys).unwrap();
        let u = sim.unitary(&grover_inversion_sequence(&sys).unwrap()).unwrap();
        let want = CMatrix::from_element(4, 4, Complex64::new(0.5, 0.0)) - CMatrix::identity(4, 4);
        assert!(phase_aligned_distance(&zero_a_block(u.matrix()), &want) < 1e-12);
    }

    #[test]
    fn inversion_matches_hadamard_construction() {
        let sys = sys();
        let sim = Simulator::ideal(&sys).unwrap();
        // π rotation about (x̂ + ẑ)/√2 on B and C
        let h1 = |s| {
            Operator::single_spin(3, s, SpinOp::X)
                .add(&Operator::single_spin(3, s, SpinOp::Z))
                .scale(PI / 2f64.sqrt())
                .propagator(1.0)
                .unwrap()
        };
        let h = &h1(1) * &h1(2);
        let o = sim.unitary(&grover_oracle_sequence(&sys, 0, ZVariant::default()).unwrap()).unwrap();
        let built = &(&h * &o) * &h;
        let reduced = sim.unitary(&grover_inversion_sequence(&sys).unwrap()).unwrap();
        assert!(phase_aligned_distance(&zero_a_block(reduced.matrix()), &zero_a_block(built.matrix())) < 1e-10);
    }

    #[test]
    fn one_query_finds_each_item() {
        let sys = sys();
        let sim = Simulator::ideal(&sys).unwrap();
        for x0 in 0..4 {
            let run = grover_run(&sim, x0, 2, None).unwrap();
            assert!((run.population[0] - 0.25).abs() < 1e-12);
            assert!((run.population[1] - 1.0).abs() < 1e-12);
            assert!((run.population[2] - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn iteration_takes_about_20_ms() {
        let sys = sys();
        let seq = grover_iteration_sequence(&sys, 0, ZVariant::default()).unwrap();
        assert_eq!(seq.pulse_count(), 12);
        let t = seq.duration(300e-6);
        assert!((t - (1.0 / 53.8 + 6.0 * 300e-6)).abs() < 1e-12);
    }

    #[test]
    fn negative_bc_coupling() {
        let sys = sys().with_coupling(1, 2, -53.8).unwrap();
        let sim = Simulator::ideal(&sys).unwrap();
        for x0 in 0..4 {
            let u = sim.unitary(&grover_iteration_sequence(&sys, x0, ZVariant::default()).unwrap()).unwrap();
            assert!(phase_aligned_distance(&zero_a_block(u.matrix()), &ideal_grover_iteration(x0)) < 1e-12);
        }
    }

    #[test]
    fn bad_x0() {
        assert!(parse_x0("2").is_err());
        assert_eq!(parse_x0("10").unwrap(), 2);
        assert_eq!(x0_label(1), "01");
    }
}
