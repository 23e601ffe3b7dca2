//! Norm-budget truncation: the cumulative energy `M(m)`, the cutoff `k₀`,
//! and a plateau detector for picking the budget when `‖f‖` is unknown.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::eigensystem::EigenSystem;
use crate::error::{Error, Result};
use crate::synthesis::NoisyDataset;
use crate::variational::{Method, RegularizedSolution, SolutionParams};

pub const DEFAULT_PLATEAU_WINDOW: usize = 3;
pub const DEFAULT_PLATEAU_FLATNESS: f64 = 0.05;
const CUTOFF_SLACK: f64 = 64.0 * f64::EPSILON;

/// `M(m) = Σ_{k ≤ m} (ḡ_k / λ_k)²` for `m = 1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeProfile {
    pub values: Vec<f64>,
    pub c1: Option<f64>,
}

impl CumulativeProfile {
    pub fn from_values(values: Vec<f64>) -> Self {
        CumulativeProfile { values, c1: None }
    }

    /// `M(m)`, 1-based.
    pub fn at(&self, m: usize) -> f64 {
        self.values[m - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest `m` with `M(m) ≤ c1`, or 0. Comparison allows a few ulps so
    /// that a budget computed as `‖f‖²` admits the exact partial sum.
    pub fn cutoff(&self, c1: f64) -> usize {
        let limit = c1 * (1.0 + CUTOFF_SLACK);
        // M is non-decreasing
        self.values.partition_point(|&m| m <= limit)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,M\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(s, "{},{v:e}", i + 1);
        }
        s
    }
}

pub fn cumulative_profile(data: &NoisyDataset, es: &EigenSystem) -> Result<CumulativeProfile> {
    let n = data.n_coeff;
    if n > es.count() {
        return Err(Error::Index {
            index: n,
            max: es.count(),
        });
    }
    let mut acc = 0.0;
    let values = data
        .coeffs
        .iter()
        .zip(es.eigenvalues())
        .map(|(g, l)| {
            let r = g / l;
            acc += r * r;
            acc
        })
        .collect();
    Ok(CumulativeProfile { values, c1: None })
}

fn check_budget(c1: f64) -> Result<()> {
    if !(c1 > 0.0) {
        return Err(Error::Parameter(format!("norm budget must be positive, got {c1}")));
    }
    Ok(())
}

/// `k₀(ε) = max{m : M(m) ≤ C₁}`.
pub fn k0_cutoff(data: &NoisyDataset, es: &EigenSystem, c1: f64) -> Result<usize> {
    check_budget(c1)?;
    Ok(cumulative_profile(data, es)?.cutoff(c1))
}

/// `ḡ_k / λ_k` for `k ≤ k₀(ε)`.
pub fn f0_approximation(
    data: &NoisyDataset,
    es: &EigenSystem,
    c1: f64,
) -> Result<RegularizedSolution> {
    let k0 = k0_cutoff(data, es, c1)?;
    let coeffs = (1..=k0)
        .map(|k| (k, data.coeff(k) / es.eigenvalues()[k - 1]))
        .collect();
    Ok(RegularizedSolution::new(
        Method::F0,
        SolutionParams {
            c1: Some(c1),
            cutoff: Some(k0),
            ..Default::default()
        },
        coeffs,
    ))
}

/// A flat stretch `start..=end` (1-based `m`) of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub start: usize,
    pub end: usize,
    pub level: f64,
}

/// Maximal runs of at least `window` indices over which
/// `max M / min M ≤ 1 + flatness`.
pub fn detect_plateau(
    profile: &CumulativeProfile,
    window: usize,
    flatness: f64,
) -> Result<Vec<Plateau>> {
    if window < 2 {
        return Err(Error::Parameter(format!("plateau window must be >= 2, got {window}")));
    }
    if !(flatness > 0.0) {
        return Err(Error::Parameter(format!(
            "plateau flatness must be positive, got {flatness}"
        )));
    }
    let m = &profile.values;
    let limit = 1.0 + flatness;
    let mut out = Vec::new();
    let mut start = 0;
    while start < m.len() {
        let (mut lo, mut hi) = (m[start], m[start]);
        let mut end = start;
        while end + 1 < m.len() {
            let v = m[end + 1];
            let (nlo, nhi) = (lo.min(v), hi.max(v));
            if nhi > limit * nlo {
                break;
            }
            lo = nlo;
            hi = nhi;
            end += 1;
        }
        if end + 1 - start >= window {
            let level = m[start..=end].iter().sum::<f64>() / (end + 1 - start) as f64;
            out.push(Plateau {
                start: start + 1,
                end: end + 1,
                level,
            });
            start = end + 1;
        } else {
            start += 1;
        }
    }
    Ok(out)
}
