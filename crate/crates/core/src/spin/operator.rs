use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::SpinSystem;
use crate::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Single-spin operator kinds, `I = σ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinOp {
    X,
    Y,
    Z,
    /// `I₊ = |0⟩⟨1|`
    Plus,
    /// `I₋ = |1⟩⟨0|`
    Minus,
}

impl SpinOp {
    fn matrix(self) -> [[Complex64; 2]; 2] {
        let h = 0.5;
        match self {
            SpinOp::X => [[ZERO, Complex64::new(h, 0.0)], [Complex64::new(h, 0.0), ZERO]],
            SpinOp::Y => [[ZERO, Complex64::new(0.0, -h)], [Complex64::new(0.0, h), ZERO]],
            SpinOp::Z => [[Complex64::new(h, 0.0), ZERO], [ZERO, Complex64::new(-h, 0.0)]],
            SpinOp::Plus => [[ZERO, ONE], [ZERO, ZERO]],
            SpinOp::Minus => [[ZERO, ZERO], [ONE, ZERO]],
        }
    }
}

/// Rotation axis in the transverse plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    MinusX,
    MinusY,
}

impl Axis {
    /// RF phase of the axis measured from +x towards +y.
    pub fn phase(self) -> f64 {
        match self {
            Axis::X => 0.0,
            Axis::Y => PI / 2.0,
            Axis::MinusX => PI,
            Axis::MinusY => 3.0 * PI / 2.0,
        }
    }

    pub fn negated(self) -> Axis {
        match self {
            Axis::X => Axis::MinusX,
            Axis::Y => Axis::MinusY,
            Axis::MinusX => Axis::X,
            Axis::MinusY => Axis::Y,
        }
    }
}

/// A linear operator on the 2ⁿ-dimensional spin Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: CMatrix,
}

impl Operator {
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), actual: mat.ncols() });
        }
        Ok(Operator { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Operator { mat: CMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Operator { mat: CMatrix::zeros(dim, dim) }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Operator { mat: CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)) }
    }

    /// `op` acting on `spin` of an `n`-spin register.
    pub fn single_spin(n: usize, spin: usize, op: SpinOp) -> Self {
        let m = op.matrix();
        Self::embed(n, spin, &m)
    }

    /// Embeds a 2×2 matrix on `spin` (spin 0 is the most significant bit).
    pub fn embed(n: usize, spin: usize, m: &[[Complex64; 2]; 2]) -> Self {
        let dim = 1usize << n;
        let bit = 1usize << (n - 1 - spin);
        let mat = CMatrix::from_fn(dim, dim, |r, c| {
            if (r & !bit) != (c & !bit) {
                return ZERO;
            }
            let rb = usize::from(r & bit != 0);
            let cb = usize::from(c & bit != 0);
            m[rb][cb]
        });
        Operator { mat }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Operator { mat: self.mat.adjoint() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Operator { mat: &self.mat * Complex64::new(s, 0.0) }
    }

    pub fn add(&self, other: &Operator) -> Self {
        Operator { mat: &self.mat + &other.mat }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.mat[(r, c)]
    }

    /// Largest entry-wise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.mat - self.mat.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `‖U†U − I‖_max`
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.mat.adjoint() * &self.mat - CMatrix::identity(d, d)))
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|r| (0..d).all(|c| r == c || self.mat[(r, c)] == ZERO))
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.mat.diagonal().iter().copied().collect()
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        Operator { mat: &self.mat * &other.mat - &other.mat * &self.mat }
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs(&(&self.mat - &other.mat))
    }

    /// Max-norm distance after removing the relative global phase.
    pub fn distance_up_to_phase(&self, other: &Operator) -> f64 {
        phase_aligned_distance(&self.mat, &other.mat)
    }

    /// `exp(−i H t)` for Hermitian `H`.
    ///
    /// Diagonal Hamiltonians are exponentiated entry-wise; anything else goes
    /// through a Hermitian eigendecomposition so the result is unitary to
    /// rounding.
    pub fn propagator(&self, t: f64) -> Result<Operator> {
        let err = self.hermiticity_error();
        if err > 1e-9 * (1.0 + max_abs(&self.mat)) {
            return Err(Error::NotHermitian(err));
        }
        if self.is_diagonal() {
            let d: Vec<Complex64> = self
                .mat
                .diagonal()
                .iter()
                .map(|e| Complex64::from_polar(1.0, -e.re * t))
                .collect();
            return Ok(Operator::from_diagonal(&d));
        }
        Ok(Operator { mat: expm_i_hermitian(&self.mat, t) })
    }

    /// Principal sub-block on the listed basis states.
    pub fn block(&self, states: &[usize]) -> CMatrix {
        CMatrix::from_fn(states.len(), states.len(), |r, c| self.mat[(states[r], states[c])])
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator { mat: &self.mat * &rhs.mat }
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        Operator { mat: self.mat * rhs.mat }
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |A − e^{iφ} B|` with `φ` fixed by the largest-magnitude entry of `B`.
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let (idx, _) = b
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    let pa = a.as_slice()[idx];
    let pb = b.as_slice()[idx];
    if pa.norm() == 0.0 || pb.norm() == 0.0 {
        return max_abs(&(a - b));
    }
    let phase = (pa * pb.conj()) / (pa.norm() * pb.norm());
    max_abs(&(a - b * phase))
}

/// `exp(−i K t)` for a Hermitian matrix `K`.
pub(crate) fn expm_i_hermitian(k: &CMatrix, t: f64) -> CMatrix {
    // Symmetrize so the eigensolver sees an exactly Hermitian input.
    let herm = (k + k.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l * t)));
    v * phases * v.adjoint()
}

/// Single-spin rotation `exp(−iθ(cos φ I_x + sin φ I_y))` as a 2×2 matrix.
pub fn rotation_2x2(phase: f64, angle: f64) -> [[Complex64; 2]; 2] {
    let c = (angle / 2.0).cos();
    let s = (angle / 2.0).sin();
    // −i s (cos φ σx + sin φ σy)
    let off_upper = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, -phase);
    let off_lower = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, phase);
    [[Complex64::new(c, 0.0), off_upper], [off_lower, Complex64::new(c, 0.0)]]
}

/// Right-hand-rule rotation of one spin by `angle` radians about `axis`.
pub fn rotation_unitary(sys: &SpinSystem, spin: usize, axis: Axis, angle: f64) -> Result<Operator> {
    sys.check_spin(spin)?;
    rotation_with_phase(sys.n(), spin, axis.phase(), angle)
}

/// Rotation about the transverse axis at RF phase `phase`.
pub fn rotation_with_phase(n: usize, spin: usize, phase: f64, angle: f64) -> Result<Operator> {
    if !angle.is_finite() || !phase.is_finite() {
        return Err(Error::InvalidPulse(format!("non-finite rotation angle {angle} / phase {phase}")));
    }
    Ok(Operator::embed(n, spin, &rotation_2x2(phase, angle)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spin_operators_follow_pauli_convention() {
        let z = Operator::single_spin(1, 0, SpinOp::Z);
        assert_eq!(z.get(0, 0), c(0.5, 0.0));
        let x = Operator::single_spin(1, 0, SpinOp::X);
        let y = Operator::single_spin(1, 0, SpinOp::Y);
        // [Ix, Iy] = i Iz
        let comm = x.commutator(&y);
        assert!(comm.max_abs_diff(&z.scale(1.0).mul_i()) < 1e-15);
    }

    impl Operator {
        fn mul_i(&self) -> Operator {
            Operator { mat: &self.mat * c(0.0, 1.0) }
        }
    }

    #[test]
    fn embedding_puts_first_spin_on_msb() {
        let z0 = Operator::single_spin(3, 0, SpinOp::Z);
        // |100⟩ is index 4: spin A in |1⟩
        assert_eq!(z0.get(4, 4), c(-0.5, 0.0));
        assert_eq!(z0.get(3, 3), c(0.5, 0.0));
        let z2 = Operator::single_spin(3, 2, SpinOp::Z);
        assert_eq!(z2.get(1, 1), c(-0.5, 0.0));
    }

    #[test]
    fn y90_takes_ground_state_to_plus_x() {
        let sys = SpinSystem::new(vec!["A".into()], vec![0.0], &[], vec![1.0]).unwrap();
        let u = rotation_unitary(&sys, 0, Axis::Y, PI / 2.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u.get(0, 0) - c(r, 0.0)).norm() < 1e-15);
        assert!((u.get(1, 0) - c(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn x180_twice_is_minus_identity() {
        let sys = SpinSystem::new(vec!["A".into()], vec![0.0], &[], vec![1.0]).unwrap();
        let u = rotation_unitary(&sys, 0, Axis::X, PI).unwrap();
        let uu = &u * &u;
        assert!(uu.max_abs_diff(&Operator::identity(2).scale(-1.0)) < 1e-15);
    }

    #[test]
    fn y_x_ybar_is_z90_up_to_phase() {
        // 2x2 oracle: Rz(π/2) = diag(e^{-iπ/4}, e^{iπ/4})
        let sys = SpinSystem::new(vec!["A".into()], vec![0.0], &[], vec![1.0]).unwrap();
        let y = rotation_unitary(&sys, 0, Axis::Y, PI / 2.0).unwrap();
        let x = rotation_unitary(&sys, 0, Axis::X, PI / 2.0).unwrap();
        let yb = rotation_unitary(&sys, 0, Axis::MinusY, PI / 2.0).unwrap();
        let composite = &(&yb * &x) * &y;
        let rz = Operator::from_diagonal(&[Complex64::from_polar(1.0, -PI / 4.0), Complex64::from_polar(1.0, PI / 4.0)]);
        assert!(composite.distance_up_to_phase(&rz) < 1e-12);
    }

    #[test]
    fn propagator_of_general_hermitian_is_unitary() {
        let x = Operator::single_spin(2, 0, SpinOp::X);
        let zz = &Operator::single_spin(2, 0, SpinOp::Z) * &Operator::single_spin(2, 1, SpinOp::Z);
        let h = x.scale(3.0).add(&zz.scale(7.0));
        let u = h.propagator(0.37).unwrap();
        assert!(u.unitarity_error() < 1e-12);
        // first-order check against the series for tiny t
        let u_small = h.propagator(1e-7).unwrap();
        let approx = Operator::identity(4).add(&h.scale(1e-7).mul_i().scale(-1.0));
        assert!(u_small.max_abs_diff(&approx) < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let p = Operator::single_spin(1, 0, SpinOp::Plus);
        assert!(matches!(p.propagator(1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let a = Operator::single_spin(2, 1, SpinOp::X).into_matrix();
        let b = &a * Complex64::from_polar(1.0, 1.234);
        assert!(phase_aligned_distance(&a, &b) < 1e-15);
        assert!(phase_aligned_distance(&a, &(a.clone() * c(2.0, 0.0))) > 0.4);
    }
}
