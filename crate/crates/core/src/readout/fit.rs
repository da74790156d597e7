use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::readout::{Acquisition, Line};
use crate::CMatrix;

/// Singular-value ratio below which a linear system is treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;

/// Least-squares estimator of line amplitudes at known frequencies and decay
/// rates. The pseudo-inverse is computed once and reused for every FID
/// recorded with the same lines and sampling.
#[derive(Debug, Clone)]
pub struct LineFit {
    lines: Vec<Line>,
    pinv: CMatrix,
    samples: usize,
}

impl LineFit {
    pub fn new(lines: &[Line], acq: &Acquisition) -> Result<Self> {
        acq.validate()?;
        let n = acq.samples();
        let model = CMatrix::from_fn(n, lines.len(), |k, l| {
            let t = k as f64 * acq.dt;
            Complex64::new(-lines[l].decay_rate * t, std::f64::consts::TAU * lines[l].freq_hz * t).exp()
        });
        let svd = model.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > SINGULAR_THRESHOLD * smax) {
            return Err(Error::Singular(format!(
                "spectral lines overlap (singular value ratio {:e})",
                smin / smax
            )));
        }
        let pinv = svd.pseudo_inverse(0.0).map_err(|e| Error::Singular(e.to_string()))?;
        Ok(LineFit { lines: lines.to_vec(), pinv, samples: n })
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    /// Complex amplitude of each line at `t = 0`.
    pub fn amplitudes(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        if samples.len() != self.samples {
            return Err(Error::DimensionMismatch { expected: self.samples, actual: samples.len() });
        }
        let y = nalgebra::DVector::from_column_slice(samples);
        Ok((&self.pinv * y).iter().copied().collect())
    }
}
