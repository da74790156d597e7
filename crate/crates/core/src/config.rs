//! Error-model configuration files.
//!
//! ```toml
//! flip_angle_error = 0.02    # relative, every angle scaled by 1 + ε
//! phase_offset_deg = 0.0
//! shaped = true              # finite pulses instead of ideal rotations
//! pulse_duration_us = 300.0
//! envelope = "gaussian"      # or "rectangular"
//! truncation = 3.0           # gaussian cut-off in standard deviations
//! dephasing = true
//! ```
//!
//! Every key is optional; missing keys take the values of an error-free,
//! ideal-pulse run.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::pulse::Envelope;
use crate::sequence::{ErrorModel, PulseMode, RunOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EnvelopeKind {
    #[default]
    Gaussian,
    Rectangular,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErrorConfig {
    pub flip_angle_error: f64,
    pub phase_offset_deg: f64,
    pub shaped: bool,
    pub pulse_duration_us: f64,
    pub envelope: EnvelopeKind,
    pub truncation: f64,
    pub dephasing: bool,
}

impl Default for ErrorConfig {
    fn default() -> Self {
        ErrorConfig {
            flip_angle_error: 0.0,
            phase_offset_deg: 0.0,
            shaped: false,
            pulse_duration_us: 300.0,
            envelope: EnvelopeKind::Gaussian,
            truncation: 3.0,
            dephasing: false,
        }
    }
}

impl ErrorConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ErrorConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<()> {
        if !self.flip_angle_error.is_finite() || self.flip_angle_error <= -1.0 {
            return Err(Error::Config(format!("flip_angle_error {} must exceed -1", self.flip_angle_error)));
        }
        if !self.phase_offset_deg.is_finite() {
            return Err(Error::Config("phase_offset_deg must be finite".into()));
        }
        if !(self.pulse_duration_us > 0.0 && self.pulse_duration_us.is_finite()) {
            return Err(Error::Config(format!("pulse_duration_us {} must be positive", self.pulse_duration_us)));
        }
        if !(self.truncation > 0.0 && self.truncation.is_finite()) {
            return Err(Error::Config(format!("truncation {} must be positive", self.truncation)));
        }
        Ok(())
    }

    pub fn envelope(&self) -> Envelope {
        match self.envelope {
            EnvelopeKind::Gaussian => Envelope::Gaussian { truncation: self.truncation },
            EnvelopeKind::Rectangular => Envelope::Rectangular,
        }
    }

    pub fn run_options(&self) -> RunOptions {
        let mode = if self.shaped {
            PulseMode::Shaped { envelope: self.envelope(), duration: self.pulse_duration_us * 1e-6 }
        } else {
            PulseMode::Ideal
        };
        RunOptions {
            mode,
            errors: ErrorModel {
                flip_error: self.flip_angle_error,
                phase_offset: self.phase_offset_deg.to_radians(),
            },
            dephasing: self.dephasing,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_ideal() {
        let cfg = ErrorConfig::from_toml_str("").unwrap();
        assert_eq!(cfg.run_options(), RunOptions::ideal());
    }

    #[test]
    fn full_config() {
        let cfg = ErrorConfig::from_toml_str(
            "flip_angle_error = 0.02\nphase_offset_deg = 1.5\nshaped = true\npulse_duration_us = 250\n\
             envelope = \"rectangular\"\ndephasing = true\n",
        )
        .unwrap();
        let o = cfg.run_options();
        assert_eq!(o.mode, PulseMode::Shaped { envelope: Envelope::Rectangular, duration: 250e-6 });
        assert!((o.errors.phase_offset - 1.5f64.to_radians()).abs() < 1e-15);
        assert_eq!(o.errors.flip_error, 0.02);
        assert!(o.dephasing);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ErrorConfig::from_toml_str("flip_angle_error = -2").is_err());
        assert!(ErrorConfig::from_toml_str("typo = 1").is_err());
        assert!(ErrorConfig::from_toml_str("envelope = \"sinc\"").is_err());
        assert!(ErrorConfig::from_toml_str("pulse_duration_us = 0").is_err());
    }
}
