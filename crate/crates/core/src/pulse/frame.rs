use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::spin::{Operator, SpinOp, SpinSystem};

/// Per-spin rotating-frame offsets.
///
/// Spin `i` is observed in a frame rotating at `ω_i + Δ_i`; `delta_hz[i]` is
/// `Δ_i/2π`. The all-zero frame is resonant with every spin.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    delta_hz: Vec<f64>,
}

impl Frame {
    pub fn new(delta_hz: Vec<f64>) -> Result<Self> {
        if let Some(d) = delta_hz.iter().find(|d| !d.is_finite()) {
            return Err(Error::InvalidSequence(format!("frame offset {d} is not finite")));
        }
        Ok(Frame { delta_hz })
    }

    pub fn resonant(n: usize) -> Self {
        Frame { delta_hz: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.delta_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta_hz.is_empty()
    }

    pub fn offset_hz(&self, spin: usize) -> f64 {
        self.delta_hz[spin]
    }

    pub fn offsets_hz(&self) -> &[f64] {
        &self.delta_hz
    }

    /// Frame frequency of `spin` relative to the spectrometer carrier, Hz.
    pub fn rotation_hz(&self, sys: &SpinSystem, spin: usize) -> f64 {
        sys.offset_hz(spin) + self.delta_hz[spin]
    }

    pub(crate) fn check(&self, sys: &SpinSystem) -> Result<()> {
        if self.len() != sys.n() {
            return Err(Error::DimensionMismatch { expected: sys.n(), actual: self.len() });
        }
        Ok(())
    }
}

/// Offsets `Δ_i/2π = −J_{label,i}/2` for every spin except the label, which
/// stays resonant. Within the `|0⟩_label` subspace the computation spins then
/// feel no coupling to the label.
pub fn uncoupling_offsets(sys: &SpinSystem, label_spin: usize) -> Result<Frame> {
    sys.check_spin(label_spin)?;
    let delta = (0..sys.n())
        .map(|i| if i == label_spin { 0.0 } else { -sys.coupling_hz(label_spin, i) / 2.0 })
        .collect();
    Frame::new(delta)
}

/// The Hamiltonian seen in `frame`, assembled from operator sums:
/// the carrier-frame Hamiltonian `−Σ ω_i I_zi + Σ 2πJ_ij I_zi I_zj` plus the
/// frame term `Σ (ω_i + Δ_i) I_zi`.
///
/// This is an independent route to [`crate::spin::build_hamiltonian`], which
/// evaluates the diagonal directly.
pub fn frame_hamiltonian(sys: &SpinSystem, frame: &Frame) -> Result<Operator> {
    frame.check(sys)?;
    let n = sys.n();
    let iz: Vec<Operator> = (0..n).map(|i| Operator::single_spin(n, i, SpinOp::Z)).collect();
    let mut h = Operator::zeros(sys.dim());
    for i in 0..n {
        h = h.add(&iz[i].scale(-TAU * sys.offset_hz(i)));
        for j in (i + 1)..n {
            h = h.add(&(&iz[i] * &iz[j]).scale(TAU * sys.coupling_hz(i, j)));
        }
    }
    for i in 0..n {
        h = h.add(&iz[i].scale(TAU * frame.rotation_hz(sys, i)));
    }
    Ok(h)
}

/// Largest matrix element coupling the `|0⟩_label` and `|1⟩_label` blocks.
pub fn cross_block_norm(op: &Operator, sys: &SpinSystem, label_spin: usize) -> f64 {
    let bit = sys.bit(label_spin);
    let d = sys.dim();
    let mut worst: f64 = 0.0;
    for r in 0..d {
        for c in 0..d {
            if (r & bit) != (c & bit) {
                worst = worst.max(op.get(r, c).norm());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::build_hamiltonian;

    #[test]
    fn molecule_uncoupling_offsets() {
        let sys = SpinSystem::bromotrifluoroethylene();
        let f = uncoupling_offsets(&sys, 0).unwrap();
        assert_eq!(f.offset_hz(0), 0.0);
        assert!((f.offset_hz(1) - 61.05).abs() < 1e-12);
        assert!((f.offset_hz(2) + 37.5).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_label_gives_zero_offsets() {
        let sys = SpinSystem::new(vec!["A".into(), "B".into(), "C".into()], vec![0.0; 3], &[(1, 2, 10.0)], vec![1.0; 3])
            .unwrap();
        assert_eq!(uncoupling_offsets(&sys, 0).unwrap(), Frame::resonant(3));
    }

    #[test]
    fn two_spin_offset() {
        let sys = SpinSystem::new(vec!["P".into(), "Q".into()], vec![0.0, 0.0], &[(0, 1, 53.8)], vec![1.0; 2]).unwrap();
        let f = uncoupling_offsets(&sys, 0).unwrap();
        assert!((f.offset_hz(1) + 26.9).abs() < 1e-12);
    }

    #[test]
    fn both_routes_agree() {
        let sys = SpinSystem::bromotrifluoroethylene();
        for frame in [Frame::resonant(3), uncoupling_offsets(&sys, 0).unwrap(), Frame::new(vec![7.0, -3.0, 250.0]).unwrap()] {
            let a = frame_hamiltonian(&sys, &frame).unwrap();
            let b = build_hamiltonian(&sys, &frame).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-9);
        }
    }

    #[test]
    fn uncoupling_frame_matches_quoted_expression() {
        // H' = 2π[(1/2 + I_zA) J_BC I_zB I_zC + (1/2 − I_zA)(J_BC I_zB I_zC − J_AB I_zB − J_AC I_zC)]
        let sys = SpinSystem::bromotrifluoroethylene();
        let (jab, jac, jbc) = (-122.1, 75.0, 53.8);
        let h = frame_hamiltonian(&sys, &uncoupling_offsets(&sys, 0).unwrap()).unwrap();
        for b in 0..8usize {
            let mz = |bit: usize| if b & bit == 0 { 0.5 } else { -0.5 };
            let (a, bb, c) = (mz(4), mz(2), mz(1));
            let want = TAU * ((0.5 + a) * jbc * bb * c + (0.5 - a) * (jbc * bb * c - jab * bb - jac * c));
            assert!((h.get(b, b).re - want).abs() < 1e-9, "state {b}");
        }
        // |0⟩_A block eigenvalues are 2π·53.8·(±¼)
        for b in 0..4 {
            assert!((h.get(b, b).re.abs() - TAU * 53.8 / 4.0).abs() < 1e-9);
        }
        // ⟨100|H'|100⟩ − ⟨000|H'|000⟩ = −2π(J_AB + J_AC)/2
        let diff = h.get(4, 4).re - h.get(0, 0).re;
        assert!((diff + TAU * (jab + jac) / 2.0).abs() < 1e-9);
        assert_eq!(cross_block_norm(&h, &sys, 0), 0.0);
    }
}
