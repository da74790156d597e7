use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{Operator, SpinSystem};
use crate::CMatrix;

/// A 2ⁿ×2ⁿ Hermitian, unit-trace density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity and unit trace to `1e-10`.
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        let d = mat.nrows();
        if !mat.is_square() || !d.is_power_of_two() {
            return Err(Error::InvalidState(format!("{}x{} is not a 2^n square matrix", d, mat.ncols())));
        }
        let herm = crate::spin::operator::max_abs(&(&mat - mat.adjoint()));
        if herm > 1e-10 {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = mat.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        Ok(DensityMatrix { mat })
    }

    /// `I/d + deviation`; the deviation must be Hermitian and traceless.
    pub fn from_deviation(deviation: &CMatrix) -> Result<Self> {
        let d = deviation.nrows();
        let identity = CMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0);
        Self::from_matrix(identity + deviation)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1usize << n;
        DensityMatrix { mat: CMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0) }
    }

    pub fn from_populations(pops: &[f64]) -> Result<Self> {
        let diag: Vec<Complex64> = pops.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        Self::from_matrix(Operator::from_diagonal(&diag).into_matrix())
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        let d = psi.len();
        let mat = CMatrix::from_fn(d, d, |r, c| psi[r] * psi[c].conj() / norm);
        Self::from_matrix(mat)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_spins(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.mat[(r, c)]
    }

    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal().iter().map(|z| z.re).collect()
    }

    /// Traceless part `ρ − Tr(ρ)·I/d`.
    pub fn deviation(&self) -> CMatrix {
        let d = self.dim();
        &self.mat - CMatrix::identity(d, d) * (self.trace() / d as f64)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// `Tr(ρ A)`
    pub fn expectation(&self, op: &Operator) -> Complex64 {
        (&self.mat * op.matrix()).trace()
    }

    /// `U ρ U†`
    pub fn transformed(&self, u: &Operator) -> DensityMatrix {
        DensityMatrix { mat: u.matrix() * &self.mat * u.matrix().adjoint() }
    }

    /// Skips validation; for results of trace-preserving maps.
    pub(crate) fn from_raw(mat: CMatrix) -> Self {
        DensityMatrix { mat }
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut CMatrix {
        &mut self.mat
    }
}

/// Spin polarization `a = ħω/2k_BT` of the high-temperature Boltzmann state.
#[derive(Debug, Clone, PartialEq)]
pub enum Polarization {
    /// All spins share one `a`.
    Homonuclear(f64),
    /// One `a_i` per spin.
    Heteronuclear(Vec<f64>),
}

impl Polarization {
    fn per_spin(&self, n: usize) -> Result<Vec<f64>> {
        let a = match self {
            Polarization::Homonuclear(a) => vec![*a; n],
            Polarization::Heteronuclear(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, actual: v.len() });
                }
                v.clone()
            }
        };
        if a.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::PolarizationOutOfRange(format!("{a:?}: values must be finite and non-negative")));
        }
        let total: f64 = a.iter().sum();
        if total >= 1.0 {
            return Err(Error::PolarizationOutOfRange(format!(
                "sum of polarizations {total} must stay below 1 to keep populations positive"
            )));
        }
        Ok(a)
    }
}

/// High-temperature thermal equilibrium, first order in the polarization.
///
/// The population of basis state `|b⟩` is `(1 + Σ_i a_i s_i)/2ⁿ` with
/// `s_i = +1` for spin `i` in `|0⟩` and `−1` in `|1⟩`. For three spins with a
/// common `a` this is `{1+3a, 1+a, 1+a, 1−a, 1+a, 1−a, 1−a, 1−3a}/8`.
pub fn thermal_state(sys: &SpinSystem, polarization: &Polarization) -> Result<DensityMatrix> {
    let a = polarization.per_spin(sys.n())?;
    let d = sys.dim();
    let pops: Vec<f64> = (0..d)
        .map(|b| {
            let zeeman: f64 = (0..sys.n())
                .map(|i| if b & sys.bit(i) == 0 { a[i] } else { -a[i] })
                .sum();
            (1.0 + zeeman) / d as f64
        })
        .collect();
    let diag: Vec<Complex64> = pops.iter().map(|&p| Complex64::new(p, 0.0)).collect();
    Ok(DensityMatrix::from_raw(Operator::from_diagonal(&diag).into_matrix()))
}

/// `e^{−iHt} ρ e^{iHt}`.
pub fn evolve(rho: &DensityMatrix, h: &Operator, t: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0) {
        return Err(Error::NegativeDuration(t));
    }
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: h.dim() });
    }
    if h.is_diagonal() {
        let herm = h.hermiticity_error();
        if herm > 1e-9 {
            return Err(Error::NotHermitian(herm));
        }
        let e: Vec<f64> = h.diagonal().iter().map(|z| z.re).collect();
        let mut out = rho.mat.clone();
        for c in 0..rho.dim() {
            for r in 0..rho.dim() {
                out[(r, c)] *= Complex64::from_polar(1.0, -(e[r] - e[c]) * t);
            }
        }
        return Ok(DensityMatrix::from_raw(out));
    }
    let u = h.propagator(t)?;
    Ok(rho.transformed(&u))
}

/// Transverse relaxation over `t` seconds.
///
/// Element `(r, c)` is multiplied by `exp(−t Σ_i [bit_i(r) ≠ bit_i(c)] / T2_i)`;
/// populations are untouched.
pub fn dephase(rho: &DensityMatrix, sys: &SpinSystem, t: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0) {
        return Err(Error::NegativeDuration(t));
    }
    if rho.dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), actual: rho.dim() });
    }
    let mut out = rho.clone();
    dephase_in_place(&mut out, sys, t);
    Ok(out)
}

pub(crate) fn dephase_in_place(rho: &mut DensityMatrix, sys: &SpinSystem, t: f64) {
    if t == 0.0 {
        return;
    }
    let rates: Vec<f64> = sys.t2_all().iter().map(|t2| 1.0 / t2).collect();
    let d = rho.dim();
    // One damping factor per bit pattern of r XOR c.
    let factors: Vec<f64> = (0..d)
        .map(|diff| {
            let rate: f64 = (0..sys.n()).filter(|&i| diff & sys.bit(i) != 0).map(|i| rates[i]).sum();
            (-t * rate).exp()
        })
        .collect();
    let m = rho.matrix_mut();
    for c in 0..d {
        for r in 0..d {
            if r != c {
                m[(r, c)] *= factors[r ^ c];
            }
        }
    }
}

/// A principal block of a density matrix.
#[derive(Debug, Clone)]
pub struct SubspaceBlock {
    /// Basis indices spanning the block, in increasing order.
    pub states: Vec<usize>,
    pub block: CMatrix,
    /// Trace of `block` (not renormalized).
    pub trace: f64,
}

impl SubspaceBlock {
    /// The block divided by its trace.
    pub fn normalized(&self) -> CMatrix {
        &self.block / Complex64::new(self.trace, 0.0)
    }

    /// Traceless part of the block.
    pub fn deviation(&self) -> CMatrix {
        let k = self.states.len();
        &self.block - CMatrix::identity(k, k) * Complex64::new(self.trace / k as f64, 0.0)
    }

    pub fn populations(&self) -> Vec<f64> {
        self.block.diagonal().iter().map(|z| z.re).collect()
    }

    /// Weight `d` of an effective pure state `cI + d|ψ⟩⟨ψ|`, inferred from
    /// the Frobenius norm of the block deviation.
    pub fn effective_pure_weight(&self) -> f64 {
        let k = self.states.len() as f64;
        self.deviation().norm() / (1.0 - 1.0 / k).sqrt()
    }

    /// Projector onto the effective pure state, given its weight `d`:
    /// `|ψ⟩⟨ψ| = I/k + deviation/d`.
    pub fn effective_pure_state(&self, weight: f64) -> CMatrix {
        let k = self.states.len();
        CMatrix::identity(k, k) * Complex64::new(1.0 / k as f64, 0.0) + self.deviation() / Complex64::new(weight, 0.0)
    }
}

/// The block of basis states where `label_spin` equals `value`.
pub fn subspace_block(rho: &DensityMatrix, sys: &SpinSystem, label_spin: usize, value: u8) -> Result<SubspaceBlock> {
    sys.check_spin(label_spin)?;
    let bit = sys.bit(label_spin);
    let want = if value == 0 { 0 } else { bit };
    let states: Vec<usize> = (0..sys.dim()).filter(|s| s & bit == want).collect();
    principal_block(rho, &states)
}

/// The block on an arbitrary set of basis states.
pub fn principal_block(rho: &DensityMatrix, states: &[usize]) -> Result<SubspaceBlock> {
    if let Some(&bad) = states.iter().find(|&&s| s >= rho.dim()) {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: bad });
    }
    let block = CMatrix::from_fn(states.len(), states.len(), |r, c| rho.get(states[r], states[c]));
    let trace = block.trace().re;
    Ok(SubspaceBlock { states: states.to_vec(), block, trace })
}
