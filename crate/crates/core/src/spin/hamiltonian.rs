use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulse::Frame;
use crate::spin::{Operator, SpinSystem};

/// `I_z` eigenvalue (±½) of `spin` in basis state `index`.
pub fn m_z(sys: &SpinSystem, index: usize, spin: usize) -> f64 {
    if index & sys.bit(spin) == 0 {
        0.5
    } else {
        -0.5
    }
}

/// Diagonal of the weak-coupling Hamiltonian in a rotating frame, rad/s.
pub fn hamiltonian_diagonal(sys: &SpinSystem, frame: &Frame) -> Result<Vec<f64>> {
    if frame.len() != sys.n() {
        return Err(Error::DimensionMismatch { expected: sys.n(), actual: frame.len() });
    }
    let n = sys.n();
    Ok((0..sys.dim())
        .map(|b| {
            let mut e = 0.0;
            for i in 0..n {
                // −ω_i I_z + (ω_i + Δ_i) I_z
                e += TAU * frame.offset_hz(i) * m_z(sys, b, i);
                for j in (i + 1)..n {
                    e += TAU * sys.coupling_hz(i, j) * m_z(sys, b, i) * m_z(sys, b, j);
                }
            }
            e
        })
        .collect())
}

/// `H = −Σ ω_i I_zi + Σ_{i<j} 2πJ_ij I_zi I_zj`, moved into the frame rotating
/// at `ω_i + Δ_i` by adding `(ω_i + Δ_i) I_zi`. Diagonal, in rad/s.
pub fn build_hamiltonian(sys: &SpinSystem, frame: &Frame) -> Result<Operator> {
    let diag: Vec<Complex64> = hamiltonian_diagonal(sys, frame)?
        .into_iter()
        .map(|e| Complex64::new(e, 0.0))
        .collect();
    Ok(Operator::from_diagonal(&diag))
}
