//! Test signals, the forward map `g = Af`, and bounded uniform noise.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigensystem::{project_all, reconstruct_dense, EigenSystem, QuadratureGrid};
use crate::error::{Error, Result};

const F3_AMPLITUDES: [f64; 10] = [17.0, 23.0, 27.0, 33.0, 43.0, 55.0, 68.0, 70.0, 77.0, 81.0];
const F3_INDICES: [usize; 10] = [5, 9, 13, 17, 18, 23, 24, 25, 31, 33];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedSignal {
    /// `(1-x) sin(3 sin(3x))`
    F1,
    /// `5 sin(3πx) + 10 sin(7πx) + 15 sin(13πx)`
    F2,
    /// Ten-term sine combination with indices 5..33.
    F3,
    /// `(1-x) sin(5 sin(12x))`
    F4,
}

/// `amplitude · sin(index · π x)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineTerm {
    pub amplitude: f64,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSpec {
    Named { name: NamedSignal },
    SineCombination { terms: Vec<SineTerm> },
    Tabulated { values: Vec<f64> },
}

impl SignalSpec {
    pub fn named(name: NamedSignal) -> Self {
        SignalSpec::Named { name }
    }

    pub fn zero() -> Self {
        SignalSpec::SineCombination { terms: Vec::new() }
    }

    pub fn sines(terms: impl IntoIterator<Item = (f64, usize)>) -> Self {
        SignalSpec::SineCombination {
            terms: terms
                .into_iter()
                .map(|(amplitude, index)| SineTerm { amplitude, index })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SignalSpec::Named { .. } => Ok(()),
            SignalSpec::SineCombination { terms } => {
                let mut seen = std::collections::BTreeSet::new();
                for t in terms {
                    if t.index == 0 {
                        return Err(Error::Signal("sine indices start at 1".into()));
                    }
                    if !t.amplitude.is_finite() {
                        return Err(Error::Signal(format!(
                            "amplitude of term {} is not finite",
                            t.index
                        )));
                    }
                    if !seen.insert(t.index) {
                        return Err(Error::Signal(format!("index {} repeated", t.index)));
                    }
                }
                Ok(())
            }
            SignalSpec::Tabulated { values } => {
                if values.iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::Signal("tabulated signal has non-finite values".into()))
                }
            }
        }
    }

    /// Point evaluation; `None` for tabulated signals.
    pub fn eval(&self, x: f64) -> Option<f64> {
        match self {
            SignalSpec::Named { name } => Some(match name {
                NamedSignal::F1 => (1.0 - x) * (3.0 * (3.0 * x).sin()).sin(),
                NamedSignal::F2 => sine_sum(&[(5.0, 3), (10.0, 7), (15.0, 13)], x),
                NamedSignal::F3 => sine_sum(&f3_terms(), x),
                NamedSignal::F4 => (1.0 - x) * (5.0 * (12.0 * x).sin()).sin(),
            }),
            SignalSpec::SineCombination { terms } => Some(
                terms
                    .iter()
                    .map(|t| t.amplitude * (t.index as f64 * PI * x).sin())
                    .sum(),
            ),
            SignalSpec::Tabulated { .. } => None,
        }
    }

    pub fn sample(&self, grid: &QuadratureGrid) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            SignalSpec::Tabulated { values } => {
                if values.len() != grid.len() {
                    return Err(Error::Signal(format!(
                        "tabulated signal has {} values, grid has {} nodes",
                        values.len(),
                        grid.len()
                    )));
                }
                Ok(values.clone())
            }
            _ => Ok(grid.sample(|x| self.eval(x).expect("closed-form signal"))),
        }
    }

    /// Eigen-indices carrying the signal, when known in closed form.
    pub fn support(&self) -> Option<Vec<usize>> {
        let mut s: Vec<usize> = match self {
            SignalSpec::Named {
                name: NamedSignal::F2,
            } => vec![3, 7, 13],
            SignalSpec::Named {
                name: NamedSignal::F3,
            } => F3_INDICES.to_vec(),
            SignalSpec::SineCombination { terms } => terms
                .iter()
                .filter(|t| t.amplitude != 0.0)
                .map(|t| t.index)
                .collect(),
            _ => return None,
        };
        s.sort_unstable();
        Some(s)
    }
}

fn f3_terms() -> [(f64, usize); 10] {
    let mut t = [(0.0, 0); 10];
    for (slot, (&a, &k)) in t.iter_mut().zip(F3_AMPLITUDES.iter().zip(&F3_INDICES)) {
        *slot = (a, k);
    }
    t
}

fn sine_sum(terms: &[(f64, usize)], x: f64) -> f64 {
    terms.iter().map(|&(a, k)| a * (k as f64 * PI * x).sin()).sum()
}

/// Expansion coefficients `f_k = (f, ψ_k)`, `k = 1..=n`.
pub fn signal_coefficients(f: &SignalSpec, es: &EigenSystem, n: usize) -> Result<Vec<f64>> {
    let samples = f.sample(es.grid())?;
    project_all(&samples, es, n)
}

/// Noiseless data coefficients `g_k = λ_k f_k`, `k = 1..=n`.
pub fn forward_coefficients(f: &SignalSpec, es: &EigenSystem, n: usize) -> Result<Vec<f64>> {
    let fk = signal_coefficients(f, es, n)?;
    Ok(fk
        .iter()
        .zip(es.eigenvalues())
        .map(|(f, l)| l * f)
        .collect())
}

/// `g = Af` on the eigensystem grid, computed through all available eigenpairs.
pub fn forward_apply(f: &SignalSpec, es: &EigenSystem) -> Result<Vec<f64>> {
    let gk = forward_coefficients(f, es, es.count())?;
    reconstruct_dense(&gk, es)
}

/// Where the additive noise enters the data.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseDomain {
    /// Noise at every grid node, then projected: `sup|ḡ(x) - g(x)| ≤ ε`.
    Grid,
    /// Noise on each Fourier coefficient: `|ḡ_k - g_k| ≤ ε`, variance `ε²/3`
    /// per coefficient.
    #[default]
    Coefficients,
}

/// Seeded uniform noise on `[-ε, ε)`.
///
/// ChaCha8 keyed by the 64-bit seed; each variate uses the top 53 bits of one
/// `u64` draw, `u = bits / 2⁵³`, mapped to `ε(2u - 1)`.
#[derive(Debug, Clone)]
pub struct UniformNoise {
    rng: ChaCha8Rng,
}

impl UniformNoise {
    pub fn new(seed: u64) -> Self {
        UniformNoise {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn sample(&mut self, epsilon: f64) -> f64 {
        epsilon * (2.0 * self.unit() - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyDataset {
    pub epsilon: f64,
    pub seed: u64,
    pub n_coeff: usize,
    pub domain: NoiseDomain,
    /// `ḡ_k` for `k = 1..=n_coeff`.
    pub coeffs: Vec<f64>,
    /// `ḡ(x)` on the eigensystem grid; empty when built from coefficients alone.
    #[serde(rename = "grid_values")]
    pub g_bar: Vec<f64>,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::Parameter(format!(
            "noise bound must be finite and >= 0, got {epsilon}"
        )));
    }
    Ok(())
}

/// Adds i.i.d. `U[-ε, ε]` noise at every grid node and projects onto
/// `ψ_1..ψ_n_coeff`.
pub fn add_noise(
    g: &[f64],
    es: &EigenSystem,
    n_coeff: usize,
    epsilon: f64,
    seed: u64,
) -> Result<NoisyDataset> {
    check_epsilon(epsilon)?;
    let mut noise = UniformNoise::new(seed);
    let g_bar: Vec<f64> = g.iter().map(|v| v + noise.sample(epsilon)).collect();
    let coeffs = project_all(&g_bar, es, n_coeff)?;
    Ok(NoisyDataset {
        epsilon,
        seed,
        n_coeff,
        domain: NoiseDomain::Grid,
        coeffs,
        g_bar,
    })
}

/// Adds i.i.d. `U[-ε, ε]` noise to each data coefficient `g_k`.
pub fn add_coefficient_noise(
    g_coeffs: &[f64],
    es: &EigenSystem,
    epsilon: f64,
    seed: u64,
) -> Result<NoisyDataset> {
    check_epsilon(epsilon)?;
    let n_coeff = g_coeffs.len();
    es.check_index(n_coeff)?;
    let mut noise = UniformNoise::new(seed);
    let coeffs: Vec<f64> = g_coeffs.iter().map(|v| v + noise.sample(epsilon)).collect();
    let g_bar = reconstruct_dense(&coeffs, es)?;
    Ok(NoisyDataset {
        epsilon,
        seed,
        n_coeff,
        domain: NoiseDomain::Coefficients,
        coeffs,
        g_bar,
    })
}

impl NoisyDataset {
    /// A dataset known only through its coefficients.
    pub fn from_coefficients(coeffs: Vec<f64>, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(NoisyDataset {
            epsilon,
            seed: 0,
            n_coeff: coeffs.len(),
            domain: NoiseDomain::Coefficients,
            coeffs,
            g_bar: Vec::new(),
        })
    }

    /// `ḡ_k` (1-based).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k - 1]
    }

    pub fn coeffs_csv(&self) -> String {
        let mut s = String::from("k,g_bar_k\n");
        for (i, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{},{:e}", i + 1, c);
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Reads a `k,g_bar_k` CSV. Rows must list `k = 1, 2, …` in order.
pub fn read_coeffs_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e))?;
    let headers = reader.headers().map_err(|e| Error::parse(path, e))?.clone();
    if headers.len() < 2 || headers[0].trim() != "k" {
        return Err(Error::parse(path, "expected header \"k,g_bar_k\""));
    }
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::parse(path, e))?;
        let k: usize = rec[0].trim().parse().map_err(|e| Error::parse(path, e))?;
        if k != out.len() + 1 {
            return Err(Error::parse(path, format!("expected k = {}, got {k}", out.len() + 1)));
        }
        out.push(rec[1].trim().parse().map_err(|e| Error::parse(path, e))?);
    }
    Ok(out)
}

/// Mean power of `samples` over the uniform-noise variance `ε²/3`, in dB.
pub fn snr_db(samples: &[f64], epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!(
            "SNR needs a positive noise bound, got {epsilon}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::Domain("SNR of an empty record".into()));
    }
    let power = samples.iter().map(|v| v * v).sum::<f64>() / samples.len() as f64;
    Ok(10.0 * (power / (epsilon * epsilon / 3.0)).log10())
}

/// Standard deviation of `U[-ε, ε]`.
pub fn noise_dispersion(epsilon: f64) -> f64 {
    epsilon / 3f64.sqrt()
}

/// How the noise bound fed to the variational formulas is derived from `ε`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionMode {
    #[default]
    EpsOverSqrt3,
    Eps,
}

impl DispersionMode {
    pub fn apply(self, epsilon: f64) -> f64 {
        match self {
            DispersionMode::EpsOverSqrt3 => noise_dispersion(epsilon),
            DispersionMode::Eps => epsilon,
        }
    }
}
