use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The system description shipped with the repository.
pub const BROMOTRIFLUOROETHYLENE_CFG: &str =
    include_str!("../../../../data/bromotrifluoroethylene.cfg");

/// Default per-spin T2 when a config omits it.
pub const DEFAULT_T2_S: f64 = 6.0;

/// A weakly coupled homonuclear spin-½ system.
///
/// Frequencies are offsets in Hz from a common carrier; couplings are scalar
/// J couplings in Hz. Conversion to angular units happens only when a
/// Hamiltonian or RF term is built.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    labels: Vec<String>,
    offsets_hz: Vec<f64>,
    couplings_hz: Vec<Vec<f64>>,
    t2_s: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SystemConfig {
    labels: Vec<String>,
    offsets_hz: Vec<f64>,
    #[serde(rename = "J_hz", default)]
    couplings_hz: BTreeMap<String, f64>,
    #[serde(rename = "T2_s", default)]
    t2_s: Option<Vec<f64>>,
}

impl SpinSystem {
    /// Builds a system from per-pair couplings `(i, j, J_ij)`.
    pub fn new(
        labels: Vec<String>,
        offsets_hz: Vec<f64>,
        couplings: &[(usize, usize, f64)],
        t2_s: Vec<f64>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut j = vec![vec![0.0; n]; n];
        for &(a, b, hz) in couplings {
            if a >= n || b >= n {
                return Err(Error::InvalidSystem(format!("coupling ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidSystem(format!("self coupling on spin {a}")));
            }
            j[a][b] = hz;
            j[b][a] = hz;
        }
        let sys = SpinSystem { labels, offsets_hz, couplings_hz: j, t2_s };
        sys.validate()?;
        Ok(sys)
    }

    /// The three-fluorine molecule: offsets 0 / −13.2 kHz / +9.5 kHz,
    /// J_AB = −122.1 Hz, J_AC = 75.0 Hz, J_BC = 53.8 Hz, T2 = 6 s.
    pub fn bromotrifluoroethylene() -> Self {
        Self::from_config_str(BROMOTRIFLUOROETHYLENE_CFG).expect("bundled config is valid")
    }

    pub fn from_config_str(text: &str) -> Result<Self> {
        let cfg: SystemConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let n = cfg.labels.len();
        let mut pairs = Vec::new();
        for (key, hz) in &cfg.couplings_hz {
            let (a, b) = key
                .split_once(',')
                .ok_or_else(|| Error::Config(format!("coupling key `{key}` must look like \"A,B\"")))?;
            let find = |name: &str| {
                cfg.labels
                    .iter()
                    .position(|l| l == name.trim())
                    .ok_or_else(|| Error::Config(format!("coupling key `{key}`: unknown spin {}", name.trim())))
            };
            pairs.push((find(a)?, find(b)?, *hz));
        }
        let t2 = cfg.t2_s.unwrap_or_else(|| vec![DEFAULT_T2_S; n]);
        Self::new(cfg.labels, cfg.offsets_hz, &pairs, t2)
    }

    pub fn from_config_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_config_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_config_string(&self) -> String {
        let mut couplings = BTreeMap::new();
        for i in 0..self.n() {
            for j in (i + 1)..self.n() {
                if self.couplings_hz[i][j] != 0.0 {
                    couplings.insert(format!("{},{}", self.labels[i], self.labels[j]), self.couplings_hz[i][j]);
                }
            }
        }
        let cfg = SystemConfig {
            labels: self.labels.clone(),
            offsets_hz: self.offsets_hz.clone(),
            couplings_hz: couplings,
            t2_s: Some(self.t2_s.clone()),
        };
        toml::to_string(&cfg).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if n == 0 {
            return Err(Error::InvalidSystem("at least one spin is required".into()));
        }
        if n > 10 {
            return Err(Error::InvalidSystem(format!("{n} spins is beyond the dense simulator")));
        }
        if self.offsets_hz.len() != n || self.t2_s.len() != n {
            return Err(Error::InvalidSystem(format!(
                "{n} labels but {} offsets and {} T2 values",
                self.offsets_hz.len(),
                self.t2_s.len()
            )));
        }
        for (i, l) in self.labels.iter().enumerate() {
            if l.is_empty() || !l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::InvalidSystem(format!("invalid label `{l}`")));
            }
            if self.labels[..i].contains(l) {
                return Err(Error::InvalidSystem(format!("duplicate label `{l}`")));
            }
        }
        if let Some(t) = self.t2_s.iter().find(|t| !(**t > 0.0)) {
            return Err(Error::InvalidSystem(format!("T2 must be positive, got {t}")));
        }
        if self.offsets_hz.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidSystem("offsets must be finite".into()));
        }
        for i in 0..n {
            if self.couplings_hz[i][i] != 0.0 {
                return Err(Error::InvalidSystem("coupling matrix must have a zero diagonal".into()));
            }
            for j in 0..n {
                let jij = self.couplings_hz[i][j];
                if !jij.is_finite() || jij != self.couplings_hz[j][i] {
                    return Err(Error::InvalidSystem("coupling matrix must be finite and symmetric".into()));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Hilbert-space dimension 2ⁿ.
    pub fn dim(&self) -> usize {
        1 << self.n()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, spin: usize) -> &str {
        &self.labels[spin]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownSpin(label.to_string()))
    }

    pub fn check_spin(&self, spin: usize) -> Result<()> {
        if spin < self.n() {
            Ok(())
        } else {
            Err(Error::UnknownSpin(format!("#{spin}")))
        }
    }

    pub fn offset_hz(&self, spin: usize) -> f64 {
        self.offsets_hz[spin]
    }

    pub fn offsets_hz(&self) -> &[f64] {
        &self.offsets_hz
    }

    pub fn coupling_hz(&self, a: usize, b: usize) -> f64 {
        self.couplings_hz[a][b]
    }

    pub fn t2(&self, spin: usize) -> f64 {
        self.t2_s[spin]
    }

    pub fn t2_all(&self) -> &[f64] {
        &self.t2_s
    }

    pub fn with_t2(mut self, t2_s: Vec<f64>) -> Result<Self> {
        self.t2_s = t2_s;
        self.validate()?;
        Ok(self)
    }

    pub fn with_coupling(mut self, a: usize, b: usize, hz: f64) -> Result<Self> {
        self.check_spin(a)?;
        self.check_spin(b)?;
        if a == b {
            return Err(Error::InvalidSystem(format!("self coupling on spin {a}")));
        }
        self.couplings_hz[a][b] = hz;
        self.couplings_hz[b][a] = hz;
        self.validate()?;
        Ok(self)
    }

    /// Bit mask of `spin` inside a basis index (spin 0 is the most significant bit).
    pub fn bit(&self, spin: usize) -> usize {
        1 << (self.n() - 1 - spin)
    }

    /// Basis label such as `"010"`.
    pub fn basis_label(&self, index: usize) -> String {
        (0..self.n())
            .map(|s| if index & self.bit(s) != 0 { '1' } else { '0' })
            .collect()
    }
}
