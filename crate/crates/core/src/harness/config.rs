use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::infoselect::SelectionParams;
use crate::synthesis::{DispersionMode, NamedSignal, NoiseDomain, SignalSpec};
use crate::variational::Method;

pub const MIN_GRID_SIZE: usize = 65;
pub const PRESETS: [&str; 4] = ["example1", "example2", "example3", "example4"];

/// Seed list, either explicit or `base, base + 1, …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Range { base: u64, count: usize },
}

impl Seeds {
    pub fn expand(&self) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.clone(),
            Seeds::Range { base, count } => (0..*count as u64).map(|i| base + i).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Seeds::List(v) => v.len(),
            Seeds::Range { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Prior variances fed to the best linear estimate. The noise shape is
/// `ν_k = 1` unless given explicitly.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlpPrior {
    /// `ρ_k = |f_k|` from the true signal.
    #[default]
    Oracle,
    /// `ρ_k = E / c_k`, the largest amplitude the constraint allows.
    Constraint,
    Explicit { rho: Vec<f64>, nu: Vec<f64> },
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub signal: SignalSpec,
    pub epsilon: f64,
    pub n_coeff: usize,
    pub grid_size: usize,
    pub seeds: Seeds,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Solution bound `E`; defaults to the quadrature norm of the signal.
    #[serde(default, rename = "E_override")]
    pub e_override: Option<f64>,
    /// Norm budget `C₁`; defaults to `‖f‖²`.
    #[serde(default)]
    pub c1_override: Option<f64>,
    #[serde(default)]
    pub dispersion_mode: DispersionMode,
    #[serde(default)]
    pub noise_domain: NoiseDomain,
    #[serde(default)]
    pub selection: SelectionParams,
    #[serde(default)]
    pub blp_prior: BlpPrior,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Figure configurations: signal, noise bound and record length, with
    /// `c_k = k` and 100 seeds starting at 0.
    pub fn preset(name: &str) -> Result<Self> {
        let (signal, epsilon, n_coeff) = match name {
            "example1" => (NamedSignal::F1, 1e-4, 512),
            "example2" => (NamedSignal::F2, 3e-3, 512),
            "example3" => (NamedSignal::F3, 1e-3, 1024),
            "example4" => (NamedSignal::F4, 1e-4, 512),
            _ => {
                return Err(Error::Config(format!(
                    "unknown preset {name:?} (expected one of {})",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(ExperimentConfig {
            name: name.to_string(),
            signal: SignalSpec::named(signal),
            epsilon,
            n_coeff,
            grid_size: 2 * n_coeff + 1,
            seeds: Seeds::Range { base: 0, count: 100 },
            methods: default_methods(),
            e_override: None,
            c1_override: None,
            dispersion_mode: DispersionMode::default(),
            noise_domain: NoiseDomain::default(),
            selection: SelectionParams::default(),
            blp_prior: BlpPrior::default(),
            output_dir: None,
        })
    }

    pub fn with_seed_count(mut self, count: usize) -> Self {
        let base = match self.seeds {
            Seeds::Range { base, .. } => base,
            Seeds::List(ref v) => v.first().copied().unwrap_or(0),
        };
        self.seeds = Seeds::Range { base, count };
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_size < MIN_GRID_SIZE || self.grid_size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "grid_size must be odd and >= {MIN_GRID_SIZE}, got {}",
                self.grid_size
            )));
        }
        let n_max = (self.grid_size - 1) / 2;
        if self.n_coeff < crate::infoselect::MIN_RECORD || self.n_coeff > n_max {
            return Err(Error::Config(format!(
                "n_coeff must lie in {}..={n_max} for grid_size {}, got {}",
                crate::infoselect::MIN_RECORD,
                self.grid_size,
                self.n_coeff
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be finite and >= 0, got {}",
                self.epsilon
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seed list is empty".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::Config(format!("method {m} listed twice")));
            }
        }
        if let Some(e) = self.e_override {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::Config(format!("E_override must be positive, got {e}")));
            }
        }
        if let Some(c) = self.c1_override {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Config(format!("c1_override must be positive, got {c}")));
            }
        }
        if let BlpPrior::Explicit { rho, nu } = &self.blp_prior {
            if rho.len() < self.n_coeff || nu.len() < self.n_coeff {
                return Err(Error::Config(format!(
                    "explicit prior needs {} entries for rho and nu",
                    self.n_coeff
                )));
            }
        }
        if let SignalSpec::Tabulated { values } = &self.signal {
            if values.len() != self.grid_size {
                return Err(Error::Config(format!(
                    "tabulated signal has {} values, grid_size is {}",
                    values.len(),
                    self.grid_size
                )));
            }
        }
        self.signal.validate()?;
        self.selection.validate()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// SHA-256 of the canonical JSON form, ignoring `output_dir`.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.output_dir = None;
        let bytes = serde_json::to_vec(&c)?;
        Ok(hex::encode(Sha256::digest(&bytes)))
    }
}
