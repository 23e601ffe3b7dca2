//! Frequency-selective regularization driven by the autocorrelation of the
//! noisy Fourier coefficients.
//!
//! The coefficient record `ḡ_1..ḡ_N` is treated as a stationary series. Lags
//! whose sample autocorrelation is significantly non-zero reveal pairs of
//! correlated, hence informative, coefficients. The pipeline is:
//!
//! 1. [`autocorr_estimate`]: lag-`n` correlation of the scatter
//!    `(ḡ_k, ḡ_{k+n})`, each side centered on its own mean.
//! 2. [`detect_n0`]: hypothesis generation and verification of the lag `n₀`
//!    beyond which the theoretical autocorrelation vanishes, testing against
//!    Bartlett's large-lag standard error ([`bartlett_stderr`]).
//! 3. [`build_q`]: lags in `(0, n₀]` that exceed the pure-randomness band.
//! 4. [`select_pairs`]: for every such lag, the pair contributing most.
//! 5. [`reconstruct_bhat`]: `Σ_{k∈𝓘} (ḡ_k/λ_k) ψ_k` over the selected indices.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::eigensystem::EigenSystem;
use crate::error::{Error, Result};
use crate::synthesis::NoisyDataset;
use crate::variational::{Method, RegularizedSolution, SolutionParams};

/// Two-sided 95% normal quantile.
pub const DEFAULT_Z: f64 = 1.96;
/// Shortest record the estimator accepts.
pub const MIN_RECORD: usize = 8;

/// Which lags the `n₀` search may visit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum MaxLag {
    /// `round(10 log₁₀ N)`, the usual correlogram length.
    #[default]
    Log,
    /// `min(N - 8, N / 2)`.
    HalfRecord,
    Fixed(usize),
}

impl MaxLag {
    /// Largest lag scanned for a record of length `n`.
    pub fn resolve(self, n: usize) -> usize {
        let cap = n.saturating_sub(2);
        let lag = match self {
            MaxLag::Log => (10.0 * (n as f64).log10()).round() as usize,
            MaxLag::HalfRecord => n.saturating_sub(MIN_RECORD).min(n / 2),
            MaxLag::Fixed(l) => l,
        };
        lag.min(cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    /// Significance multiplier on the standard error.
    pub z: f64,
    pub max_lag: MaxLag,
}

impl Default for SelectionParams {
    fn default() -> Self {
        SelectionParams {
            z: DEFAULT_Z,
            max_lag: MaxLag::default(),
        }
    }
}

impl SelectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.z > 0.0 && self.z.is_finite()) {
            return Err(Error::Parameter(format!(
                "significance multiplier must be positive, got {}",
                self.z
            )));
        }
        Ok(())
    }
}

/// Sample autocorrelations `δ(n)`, `n = 0..N-1`; `None` where a centered sum
/// vanishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocorrSeries {
    pub delta: Vec<Option<f64>>,
    pub n_count: usize,
}

impl AutocorrSeries {
    pub fn get(&self, n: usize) -> Option<f64> {
        self.delta.get(n).copied().flatten()
    }

    /// `|δ(n)|`, zero when undefined.
    fn magnitude(&self, n: usize) -> f64 {
        self.get(n).map_or(0.0, f64::abs)
    }

    /// `Σ_{v=1}^{n0} δ(v)²` for every `n0`, undefined lags counting as zero.
    fn cumulative_squares(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.n_count);
        out.push(0.0);
        for n in 1..self.n_count {
            let d = self.get(n).unwrap_or(0.0);
            acc += d * d;
            out.push(acc);
        }
        out
    }

    /// Correlogram CSV `n,delta,threshold0,threshold_n0`; undefined entries
    /// are left empty.
    pub fn to_csv(&self, n0: usize, z: f64) -> String {
        let sums = self.cumulative_squares();
        let mut s = String::from("n,delta,threshold0,threshold_n0\n");
        for n in 0..self.n_count {
            let _ = write!(s, "{n},");
            if let Some(d) = self.get(n) {
                let _ = write!(s, "{d:e}");
            }
            s.push(',');
            if n > 0 {
                let _ = write!(s, "{:e}", z * stderr_from(sums[0], self.n_count, n));
            }
            s.push(',');
            if n > n0 {
                let _ = write!(s, "{:e}", z * stderr_from(sums[n0], self.n_count, n));
            }
            s.push('\n');
        }
        s
    }
}

fn stderr_from(sum_sq: f64, n_count: usize, n: usize) -> f64 {
    ((1.0 + 2.0 * sum_sq) / (n_count - n) as f64).sqrt()
}

/// Lag-`n` correlation of `(ḡ_k, ḡ_{k+n})`, `k = 1..N-n`, with lag-dependent
/// means.
pub fn autocorr_estimate(coeffs: &[f64]) -> Result<AutocorrSeries> {
    let n_count = coeffs.len();
    if n_count < MIN_RECORD {
        return Err(Error::Parameter(format!(
            "autocorrelation needs at least {MIN_RECORD} coefficients, got {n_count}"
        )));
    }
    if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
        return Err(Error::DegenerateSequence(format!(
            "coefficient {} is not finite",
            k + 1
        )));
    }
    let scale: f64 = coeffs.iter().map(|c| c * c).sum::<f64>() / n_count as f64;
    // centered sums below this are rounding noise of a constant segment
    let floor = scale * 1e-24;

    let mut delta = Vec::with_capacity(n_count);
    for lag in 0..n_count {
        let len = n_count - lag;
        let head = &coeffs[..len];
        let tail = &coeffs[lag..];
        let mean_h = head.iter().sum::<f64>() / len as f64;
        let mean_t = tail.iter().sum::<f64>() / len as f64;
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (x, y) in head.iter().zip(tail) {
            let (dx, dy) = (x - mean_h, y - mean_t);
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
        let defined = sxx > floor * len as f64 && syy > floor * len as f64;
        if lag == 0 {
            if !defined {
                return Err(Error::DegenerateSequence(
                    "coefficient record is constant".into(),
                ));
            }
            delta.push(Some(1.0));
        } else if defined {
            delta.push(Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)));
        } else {
            delta.push(None);
        }
    }
    Ok(AutocorrSeries { delta, n_count })
}

/// Large-lag standard error `σ_δ(n; n₀)` with the estimated `δ(v)` standing in
/// for the theoretical autocorrelations.
pub fn bartlett_stderr(series: &AutocorrSeries, n0: usize, n: usize) -> Result<f64> {
    if n <= n0 || n >= series.n_count {
        return Err(Error::Domain(format!(
            "large-lag standard error needs {n0} < n < {}, got n = {n}",
            series.n_count
        )));
    }
    let sum: f64 = (1..=n0)
        .map(|v| series.get(v).unwrap_or(0.0).powi(2))
        .sum();
    Ok(stderr_from(sum, series.n_count, n))
}

/// Recursive search for the cut lag `n₀`.
///
/// Starting from `n̄ = 0`, the first lag `n > n̄` (up to the scan limit) with
/// `|δ(n)| > z σ_δ(n; n̄)` becomes the new `n̄`; the search repeats until no
/// such lag exists.
pub fn detect_n0(series: &AutocorrSeries, params: &SelectionParams) -> usize {
    let sums = series.cumulative_squares();
    let last = params.max_lag.resolve(series.n_count);
    let mut n_bar = 0;
    loop {
        let next = (n_bar + 1..=last).find(|&n| {
            series.get(n).is_some()
                && series.magnitude(n) > params.z * stderr_from(sums[n_bar], series.n_count, n)
        });
        match next {
            Some(n) => n_bar = n,
            None => return n_bar,
        }
    }
}

/// Lags in `(0, n₀]` outside the pure-randomness band `z σ_δ(n; 0)`.
pub fn build_q(series: &AutocorrSeries, n0: usize, params: &SelectionParams) -> Vec<usize> {
    (1..=n0.min(series.n_count.saturating_sub(1)))
        .filter(|&n| {
            series.get(n).is_some()
                && series.magnitude(n) > params.z * stderr_from(0.0, series.n_count, n)
        })
        .collect()
}

/// The pair `(ḡ_k, ḡ_{k+lag})` contributing most to `δ(lag)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedPair {
    pub lag: usize,
    pub k: usize,
    pub partner: usize,
}

/// For each lag, `k* = argmax_{1 ≤ k ≤ N-lag} |ḡ_k ḡ_{k+lag}|`, ties to the
/// smallest `k`.
pub fn select_pairs(coeffs: &[f64], q: &[usize]) -> Vec<SelectedPair> {
    let mut lags: Vec<usize> = q
        .iter()
        .copied()
        .filter(|&n| n > 0 && n < coeffs.len())
        .collect();
    lags.sort_unstable();
    lags.dedup();
    lags.into_iter()
        .map(|lag| {
            let mut best = (1, f64::NEG_INFINITY);
            for (i, (a, b)) in coeffs.iter().zip(&coeffs[lag..]).enumerate() {
                let p = (a * b).abs();
                if p > best.1 {
                    best = (i + 1, p);
                }
            }
            SelectedPair {
                lag,
                k: best.0,
                partner: best.0 + lag,
            }
        })
        .collect()
}

/// `½(1 + √(1 + 8 N_c)) ≤ N_𝓘 ≤ N_c + 1`. With no significant lag this
/// demands a single index, so an empty selection is flagged.
pub fn combinatorial_bound_ok(nc: usize, n_selected: usize) -> bool {
    let lower = 0.5 * (1.0 + (1.0 + 8.0 * nc as f64).sqrt());
    lower <= n_selected as f64 && n_selected <= nc + 1
}

/// Outcome of the autocorrelation analysis of one coefficient record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub n0: usize,
    #[serde(rename = "Q")]
    pub q: Vec<usize>,
    pub nc: usize,
    pub pairs: Vec<SelectedPair>,
    #[serde(rename = "I_k")]
    pub i_k: Vec<usize>,
    pub compat_ok: bool,
    pub compat_violations: Vec<(usize, usize)>,
    pub bound_ok: bool,
    pub max_lag: usize,
    pub z: f64,
}

impl SelectionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs the full analysis on a dataset with default parameters.
pub fn build_selection(data: &NoisyDataset) -> Result<SelectionReport> {
    build_selection_with(&data.coeffs, &SelectionParams::default()).map(|(r, _)| r)
}

/// Runs the full analysis on a raw coefficient record, also returning the
/// correlogram.
pub fn build_selection_with(
    coeffs: &[f64],
    params: &SelectionParams,
) -> Result<(SelectionReport, AutocorrSeries)> {
    params.validate()?;
    let series = autocorr_estimate(coeffs)?;
    let n0 = detect_n0(&series, params);
    let q = build_q(&series, n0, params);
    let pairs = select_pairs(coeffs, &q);
    let i_k: Vec<usize> = pairs
        .iter()
        .flat_map(|p| [p.k, p.partner])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let lags: BTreeSet<usize> = q.iter().copied().collect();
    let mut compat_violations = Vec::new();
    for (i, &a) in i_k.iter().enumerate() {
        for &b in &i_k[i + 1..] {
            if !lags.contains(&(b - a)) {
                compat_violations.push((a, b));
            }
        }
    }

    let report = SelectionReport {
        n0,
        nc: q.len(),
        bound_ok: combinatorial_bound_ok(q.len(), i_k.len()),
        compat_ok: compat_violations.is_empty(),
        compat_violations,
        q,
        pairs,
        i_k,
        max_lag: params.max_lag.resolve(coeffs.len()),
        z: params.z,
    };
    Ok((report, series))
}

/// `Σ_{k∈𝓘} (ḡ_k / λ_k) ψ_k` as a coefficient list.
pub fn reconstruct_bhat(
    data: &NoisyDataset,
    es: &EigenSystem,
    report: &SelectionReport,
) -> Result<RegularizedSolution> {
    let mut coeffs = Vec::with_capacity(report.i_k.len());
    for &k in &report.i_k {
        es.check_index(k)?;
        if k > data.n_coeff {
            return Err(Error::Index {
                index: k,
                max: data.n_coeff,
            });
        }
        coeffs.push((k, data.coeff(k) / es.eigenvalues()[k - 1]));
    }
    Ok(RegularizedSolution::new(
        Method::Bhat,
        SolutionParams::default(),
        coeffs,
    ))
}
