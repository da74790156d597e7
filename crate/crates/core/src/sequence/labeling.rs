use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::pulse::{uncoupling_offsets, Frame};
use crate::sequence::{cnot_sequence_with, PulseSequence, SpectatorMode, ZVariant};
use crate::spin::{Axis, SpinSystem};

/// Logical labeling with spin 0 as the label.
pub fn labeling_sequence(sys: &SpinSystem) -> Result<PulseSequence> {
    labeling_sequence_for(sys, 0)
}

/// Population-swapping sequence that labels the 2-spin subspace `|0⟩_label`.
///
/// Swaps `|0ab⟩ ↔ |1ab⟩` whenever `a ≠ b`, i.e. a CNOT from each of the two
/// other spins onto the label, run simultaneously. Between a Ȳ and a Y pulse on
/// the label both couplings must impart a conditional phase of ±π/2 at the
/// same moment. The spin with the weaker coupling to the label evolves freely
/// for `1/(2|J_weak|)`; the other is flipped half way through so that its net
/// coupling evolution `τ₁ − τ₂` gives the opposite sign. The unconditional
/// ẑ phases cancel, so no correction pulses are needed for diagonal inputs.
/// Runs in the resonant frame.
pub fn labeling_sequence_for(sys: &SpinSystem, label: usize) -> Result<PulseSequence> {
    if sys.n() != 3 {
        return Err(Error::InvalidSystem(format!("labeling needs 3 spins, got {}", sys.n())));
    }
    sys.check_spin(label)?;
    let others: Vec<usize> = (0..3).filter(|&s| s != label).collect();
    for &s in &others {
        if sys.coupling_hz(label, s) == 0.0 {
            return Err(Error::ZeroCoupling(sys.label(label).into(), sys.label(s).into()));
        }
    }
    let (weak, strong) = if sys.coupling_hz(label, others[0]).abs() <= sys.coupling_hz(label, others[1]).abs() {
        (others[0], others[1])
    } else {
        (others[1], others[0])
    };
    let j_weak = sys.coupling_hz(label, weak);
    let j_strong = sys.coupling_hz(label, strong);
    let t_weak = 1.0 / (2.0 * j_weak.abs());
    // signed effective evolution time for the strong coupling
    let t_strong = -j_weak.signum() / (2.0 * j_strong);
    let tau1 = (t_weak + t_strong) / 2.0;
    let tau2 = (t_weak - t_strong) / 2.0;

    let mut seq = PulseSequence::new("labeling", Frame::resonant(3));
    seq.pulse(label, Axis::MinusY, PI / 2.0)
        .delay(tau1)
        .pulse(strong, Axis::X, PI)
        .delay(tau2)
        .pulse(strong, Axis::X, PI)
        .pulse(label, Axis::Y, PI / 2.0);
    Ok(seq)
}

/// Labeling, then `(|00⟩ + |11⟩)/√2` on the two computation spins inside the
/// `|0⟩_A` subspace: X on B and a CNOT B→C, both in the uncoupling frame.
/// Starting B with X rather than Y cancels the CNOT's `i` phase on `|11⟩`.
pub fn labeled_epr_preparation(sys: &SpinSystem) -> Result<PulseSequence> {
    let mut seq = labeling_sequence(sys)?;
    seq.name = "labeled EPR".into();
    let frame = uncoupling_offsets(sys, 0)?;
    let mut body = PulseSequence::new("epr", frame.clone());
    body.pulse(1, Axis::X, PI / 2.0);
    let cnot = cnot_sequence_with(sys, &frame, 1, 2, SpectatorMode::Labeled { spin: 0, value: 0 }, ZVariant::default())?;
    body.append(&cnot);
    seq.append(&body);
    Ok(seq)
}

/// Number of effective pure qubits obtainable by labeling `n` spins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capacity {
    /// `log₂(1 + C(n, n/2))`
    pub k: f64,
    pub k_int: u32,
}

/// `k = log₂(1 + C(n, n/2))` for even `n ≥ 2`.
pub fn labeling_capacity(n: u32) -> Result<Capacity> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidSystem(format!("capacity needs an even spin count ≥ 2, got {n}")));
    }
    if n <= 128 {
        let c = binomial_u128(n, n / 2);
        let m = c + 1;
        let k_int = 127 - m.leading_zeros();
        return Ok(Capacity { k: (m as f64).log2(), k_int });
    }
    // ln C(n, n/2) = Σ_{i=1}^{n/2} ln((n/2 + i) / i); the +1 is negligible
    let h = n / 2;
    let ln_c: f64 = (1..=h).map(|i| ((h + i) as f64 / i as f64).ln()).sum();
    let k = ln_c / std::f64::consts::LN_2;
    Ok(Capacity { k, k_int: k.floor() as u32 })
}

fn binomial_u128(n: u32, k: u32) -> u128 {
    let mut c: u128 = 1;
    for i in 0..k {
        // c·(n−i)/(i+1) is exact; cancel the gcd first so nothing overflows
        let d = u128::from(i + 1);
        let g = gcd(c, d);
        c = (c / g) * (u128::from(n - i) / (d / g));
    }
    c
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::Simulator;
    use crate::spin::{thermal_state, DensityMatrix, Polarization};

    #[test]
    fn delays_for_molecule_couplings() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let seq = labeling_sequence(&sys).unwrap();
        let delays: Vec<f64> = seq
            .events
            .iter()
            .filter_map(|e| match e {
                crate::sequence::SequenceEvent::Delay(t) => Some(*t),
                _ => None,
            })
            .collect();
        assert!((delays[0] - 5.3808e-3).abs() < 1e-7);
        assert!((delays[1] - 1.2858e-3).abs() < 1e-7);
    }

    #[test]
    fn swaps_exactly_two_population_pairs() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let sim = Simulator::ideal(&sys).unwrap();
        let pops = [0.30, 0.05, 0.10, 0.07, 0.11, 0.13, 0.17, 0.07];
        let out = sim.run(&DensityMatrix::from_populations(&pops).unwrap(), &labeling_sequence(&sys).unwrap()).unwrap();
        let mut want = pops;
        want.swap(0b001, 0b101);
        want.swap(0b010, 0b110);
        for (g, w) in out.populations().iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn works_for_either_coupling_sign() {
        for (jab, jac) in [(-122.1, 75.0), (122.1, 75.0), (40.0, -90.0), (-60.0, -60.0)] {
            let sys = SpinSystem::new(
                vec!["A".into(), "B".into(), "C".into()],
                vec![0.0, -13200.0, 9500.0],
                &[(0, 1, jab), (0, 2, jac), (1, 2, 53.8)],
                vec![6.0; 3],
            )
            .unwrap();
            let sim = Simulator::ideal(&sys).unwrap();
            let rho = thermal_state(&sys, &Polarization::Homonuclear(0.01)).unwrap();
            let out = sim.run(&rho, &labeling_sequence(&sys).unwrap()).unwrap();
            let a = 0.01;
            let want = [1. + 3. * a, 1. - a, 1. - a, 1. - a, 1. + a, 1. + a, 1. + a, 1. - 3. * a];
            for (g, w) in out.populations().iter().zip(want) {
                assert!((g - w / 8.0).abs() < 1e-12, "J = {jab}, {jac}");
            }
        }
    }

    #[test]
    fn capacity_small_n() {
        let c2 = labeling_capacity(2).unwrap();
        assert!((c2.k - 3f64.log2()).abs() < 1e-15);
        assert_eq!(c2.k_int, 1);
        let c4 = labeling_capacity(4).unwrap();
        assert!((c4.k - 7f64.log2()).abs() < 1e-15);
        assert_eq!(c4.k_int, 2);
        assert_eq!(labeling_capacity(40).unwrap().k_int, 37);
        assert_eq!(binomial_u128(40, 20), 137_846_528_820);
        assert!(labeling_capacity(3).is_err());
        assert!(labeling_capacity(0).is_err());
    }

    #[test]
    fn capacity_large_n_continuous() {
        let a = labeling_capacity(128).unwrap();
        let b = labeling_capacity(130).unwrap();
        // C(n+2, n/2+1) / C(n, n/2) is just under 4
        assert!(b.k - a.k > 1.98 && b.k - a.k < 2.0);
        // log-sum branch agrees with the exact branch where both apply
        let h = 64u32;
        let ln_c: f64 = (1..=h).map(|i| ((h + i) as f64 / i as f64).ln()).sum();
        assert!((ln_c / std::f64::consts::LN_2 - a.k).abs() < 1e-9);
    }
}
