use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::readout::Channel;

/// Frequency-domain view of one acquisition channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub spin: usize,
    /// Frame-relative frequencies in Hz, strictly increasing.
    pub freqs_hz: Vec<f64>,
    /// `X_k = (1/N) Σ x_n e^{−2πikn/N}` over the zero-filled record, with the
    /// zero frequency moved to the centre.
    pub amplitudes: Vec<Complex64>,
}

pub const DEFAULT_ZERO_FILL: usize = 4;

/// Discrete Fourier transform of a channel after zero-filling to
/// `zero_fill` times its length.
pub fn spectrum(channel: &Channel, dt: f64, zero_fill: usize) -> Result<Spectrum> {
    if channel.samples.len() < 2 || !(dt > 0.0) {
        return Err(Error::InvalidAcquisition("need at least 2 samples and dt > 0".into()));
    }
    if zero_fill == 0 {
        return Err(Error::InvalidAcquisition("zero-fill factor must be at least 1".into()));
    }
    let n = channel.samples.len() * zero_fill;
    let mut buf = channel.samples.clone();
    buf.resize(n, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let half = n / 2;
    let amplitudes: Vec<Complex64> = (0..n).map(|k| buf[(k + n - half) % n] * scale).collect();
    let freqs_hz = (0..n).map(|k| (k as f64 - half as f64) / (n as f64 * dt)).collect();
    Ok(Spectrum { spin: channel.spin, freqs_hz, amplitudes })
}

impl Spectrum {
    pub fn bin_width(&self) -> f64 {
        self.freqs_hz[1] - self.freqs_hz[0]
    }

    /// Index of the bin closest to `freq_hz`.
    pub fn bin_of(&self, freq_hz: f64) -> usize {
        let k = ((freq_hz - self.freqs_hz[0]) / self.bin_width()).round();
        k.clamp(0.0, (self.freqs_hz.len() - 1) as f64) as usize
    }

    pub fn at(&self, freq_hz: f64) -> Complex64 {
        self.amplitudes[self.bin_of(freq_hz)]
    }

    /// Frequency of the largest `|Re|` within `±window_hz` of `freq_hz`.
    pub fn peak_near(&self, freq_hz: f64, window_hz: f64) -> (f64, Complex64) {
        let lo = self.bin_of(freq_hz - window_hz);
        let hi = self.bin_of(freq_hz + window_hz);
        let k = (lo..=hi)
            .max_by(|&a, &b| self.amplitudes[a].re.abs().total_cmp(&self.amplitudes[b].re.abs()))
            .expect("non-empty window");
        (self.freqs_hz[k], self.amplitudes[k])
    }

    /// `Σ|X_k|²`
    pub fn power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn tone(f: f64, t2: f64, n: usize, dt: f64) -> Channel {
        let samples = (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                Complex64::new(-t / t2, TAU * f * t).exp()
            })
            .collect();
        Channel { spin: 0, samples }
    }

    #[test]
    fn lorentzian_centre_and_width() {
        let (f, t2, dt) = (-26.9, 0.5, 1e-3);
        let s = spectrum(&tone(f, t2, 4000, dt), dt, 4).unwrap();
        let (peak, amp) = s.peak_near(f, 5.0);
        assert!((peak - f).abs() <= s.bin_width());
        assert!(amp.re > 0.0);
        // half width at half maximum of the absorptive part
        let half = amp.re / 2.0;
        let k0 = s.bin_of(peak);
        let right = (k0..s.freqs_hz.len()).find(|&k| s.amplitudes[k].re < half).unwrap();
        let hwhm = s.freqs_hz[right] - peak;
        assert!((hwhm - 1.0 / (2.0 * PI * t2)).abs() <= s.bin_width(), "{hwhm}");
    }

    #[test]
    fn parseval() {
        let dt = 1e-3;
        let ch = tone(12.3, 0.3, 1000, dt);
        let s = spectrum(&ch, dt, 4).unwrap();
        let time: f64 = ch.samples.iter().map(|a| a.norm_sqr()).sum();
        let n = s.amplitudes.len() as f64;
        assert!((s.power() * n - time).abs() / time < 1e-9);
    }

    #[test]
    fn zero_in_zero_out() {
        let ch = Channel { spin: 0, samples: vec![Complex64::new(0.0, 0.0); 64] };
        let s = spectrum(&ch, 1e-3, 2).unwrap();
        assert!(s.amplitudes.iter().all(|a| a.norm() == 0.0));
        assert!(s.freqs_hz.windows(2).all(|w| w[1] > w[0]));
    }
}
