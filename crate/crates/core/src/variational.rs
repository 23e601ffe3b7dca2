//! Closed-form spectral regularizers and the per-component information measure.
//!
//! Every regularizer works on the first `data.n_coeff` eigen-components. The
//! noise bound `eps` passed in here is the one used inside the formulas; the
//! harness derives it from the raw bound through [`DispersionMode`].
//!
//! [`DispersionMode`]: crate::synthesis::DispersionMode

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::eigensystem::{reconstruct, EigenSystem};
use crate::error::{Error, Result};
use crate::synthesis::NoisyDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Tikhonov minimizer with constraint spectrum `c_k`.
    TikhonovFull,
    /// Truncation at `k_α`.
    KAlpha,
    /// Tikhonov minimizer with `C = I`.
    TikhonovIdentity,
    /// Truncation at `k_β`.
    KBeta,
    /// Best linear estimate from variance profiles.
    Blp,
    /// Norm-budget truncation at `k₀(ε)`.
    F0,
    /// Autocorrelation-selected expansion.
    Bhat,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::TikhonovFull,
        Method::KAlpha,
        Method::TikhonovIdentity,
        Method::KBeta,
        Method::Blp,
        Method::F0,
        Method::Bhat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::TikhonovFull => "tikhonov_full",
            Method::KAlpha => "k_alpha",
            Method::TikhonovIdentity => "tikhonov_identity",
            Method::KBeta => "k_beta",
            Method::Blp => "blp",
            Method::F0 => "f0",
            Method::Bhat => "bhat",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown method {s:?}")))
    }
}

/// Parameters a solution was computed with.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolutionParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
}

/// Expansion coefficients `(k, c_k)` of a regularized solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedSolution {
    pub method: Method,
    pub params: SolutionParams,
    pub coeffs: Vec<(usize, f64)>,
}

impl RegularizedSolution {
    pub fn new(method: Method, params: SolutionParams, coeffs: Vec<(usize, f64)>) -> Self {
        RegularizedSolution {
            method,
            params,
            coeffs,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&(_, c)| c == 0.0)
    }

    /// Coefficient at `k`, zero when absent.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs
            .iter()
            .find(|&&(j, _)| j == k)
            .map_or(0.0, |&(_, c)| c)
    }

    /// Dense coefficients for `k = 1..=n`.
    pub fn dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(k, c) in &self.coeffs {
            if (1..=n).contains(&k) {
                out[k - 1] = c;
            }
        }
        out
    }

    /// The solution on the eigensystem grid.
    pub fn reconstruct(&self, es: &EigenSystem) -> Result<Vec<f64>> {
        reconstruct(&self.coeffs, es, es.grid())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,coefficient\n");
        for &(k, c) in &self.coeffs {
            let _ = writeln!(s, "{k},{c:e}");
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Spectrum of the constraint operator plus the bounds `‖Cf‖ ≤ E`, noise `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub c: Vec<f64>,
    pub bound: f64,
    pub eps: f64,
}

impl ConstraintSpec {
    pub fn new(c: Vec<f64>, bound: f64, eps: f64) -> Result<Self> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::DegenerateConstraint(format!(
                "solution bound E must be positive, got {bound}"
            )));
        }
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::Parameter(format!("noise bound must be >= 0, got {eps}")));
        }
        if let Some(k) = c.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::DegenerateConstraint(format!(
                "c_{} = {} is not positive",
                k + 1,
                c[k]
            )));
        }
        if c.len() > 1 && c[c.len() - 1] <= c[0] {
            return Err(Error::DegenerateConstraint(
                "constraint spectrum must grow (c_N > c_1)".into(),
            ));
        }
        Ok(ConstraintSpec { c, bound, eps })
    }

    /// `c_k = k` for `k = 1..=n`.
    pub fn linear(n: usize, bound: f64, eps: f64) -> Result<Self> {
        Self::new((1..=n).map(|k| k as f64).collect(), bound, eps)
    }

    /// `α = ε / E`.
    pub fn alpha(&self) -> f64 {
        self.eps / self.bound
    }

    fn covers(&self, n: usize) -> Result<()> {
        if self.c.len() < n {
            return Err(Error::Parameter(format!(
                "constraint spectrum has {} entries, need {n}",
                self.c.len()
            )));
        }
        Ok(())
    }
}

/// Per-component prior signal deviations `ρ_k` and noise shape `ν_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceProfile {
    pub rho: Vec<f64>,
    pub nu: Vec<f64>,
    pub eps: f64,
}

impl VarianceProfile {
    pub fn new(rho: Vec<f64>, nu: Vec<f64>, eps: f64) -> Result<Self> {
        if rho.len() != nu.len() {
            return Err(Error::Parameter(format!(
                "rho has {} entries, nu has {}",
                rho.len(),
                nu.len()
            )));
        }
        if rho.iter().chain(&nu).any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Parameter(
                "variance profiles must be finite and non-negative".into(),
            ));
        }
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::Parameter(format!("noise scale must be >= 0, got {eps}")));
        }
        Ok(VarianceProfile { rho, nu, eps })
    }

    pub fn constant(n: usize, rho: f64, nu: f64, eps: f64) -> Result<Self> {
        Self::new(vec![rho; n], vec![nu; n], eps)
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    fn covers(&self, n: usize) -> Result<()> {
        if self.len() < n {
            return Err(Error::Parameter(format!(
                "variance profile has {} entries, need {n}",
                self.len()
            )));
        }
        Ok(())
    }
}

fn components(data: &NoisyDataset, es: &EigenSystem) -> Result<usize> {
    let n = data.n_coeff;
    if n > es.count() {
        return Err(Error::Index {
            index: n,
            max: es.count(),
        });
    }
    Ok(n)
}

fn damped(lambda: f64, g: f64, alpha: f64, c: f64) -> f64 {
    let ac = alpha * c;
    lambda * g / (lambda * lambda + ac * ac)
}

/// `λ_k ḡ_k / (λ_k² + (ε/E)² c_k²)` for every available component.
pub fn tikhonov_full(
    data: &NoisyDataset,
    es: &EigenSystem,
    cs: &ConstraintSpec,
) -> Result<RegularizedSolution> {
    let n = components(data, es)?;
    cs.covers(n)?;
    let alpha = cs.alpha();
    let coeffs = (1..=n)
        .map(|k| {
            let lam = es.eigenvalues()[k - 1];
            (k, damped(lam, data.coeff(k), alpha, cs.c[k - 1]))
        })
        .collect();
    Ok(RegularizedSolution::new(
        Method::TikhonovFull,
        SolutionParams {
            alpha: Some(alpha),
            bound: Some(cs.bound),
            eps: Some(cs.eps),
            ..Default::default()
        },
        coeffs,
    ))
}

/// Largest `k ≤ n` with `λ_k ≥ α |c_k|` (0 if none).
pub fn k_alpha(es: &EigenSystem, cs: &ConstraintSpec, n: usize) -> usize {
    let alpha = cs.alpha();
    (1..=n.min(es.count()).min(cs.c.len()))
        .rev()
        .find(|&k| es.eigenvalues()[k - 1] >= alpha * cs.c[k - 1].abs())
        .unwrap_or(0)
}

/// Largest `k ≤ n` with `λ_k ≥ ε/E` (0 if none).
pub fn k_beta(es: &EigenSystem, bound: f64, eps: f64, n: usize) -> usize {
    let ratio = eps / bound;
    (1..=n.min(es.count()))
        .rev()
        .find(|&k| es.eigenvalues()[k - 1] >= ratio)
        .unwrap_or(0)
}

fn unfiltered(data: &NoisyDataset, es: &EigenSystem, upto: usize) -> Vec<(usize, f64)> {
    (1..=upto)
        .map(|k| (k, data.coeff(k) / es.eigenvalues()[k - 1]))
        .collect()
}

/// `ḡ_k / λ_k` for `k ≤ k_α`.
pub fn truncated_k_alpha(
    data: &NoisyDataset,
    es: &EigenSystem,
    cs: &ConstraintSpec,
) -> Result<RegularizedSolution> {
    let n = components(data, es)?;
    cs.covers(n)?;
    let cut = k_alpha(es, cs, n);
    Ok(RegularizedSolution::new(
        Method::KAlpha,
        SolutionParams {
            alpha: Some(cs.alpha()),
            bound: Some(cs.bound),
            eps: Some(cs.eps),
            cutoff: Some(cut),
            ..Default::default()
        },
        unfiltered(data, es, cut),
    ))
}

fn check_bound(bound: f64) -> Result<()> {
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::DegenerateConstraint(format!(
            "solution bound E must be positive, got {bound}"
        )));
    }
    Ok(())
}

/// `λ_k ḡ_k / (λ_k² + (ε/E)²)`: the `C = I` minimizer.
pub fn tikhonov_identity(
    data: &NoisyDataset,
    es: &EigenSystem,
    bound: f64,
    eps: f64,
) -> Result<RegularizedSolution> {
    check_bound(bound)?;
    let n = components(data, es)?;
    let alpha = eps / bound;
    let coeffs = (1..=n)
        .map(|k| (k, damped(es.eigenvalues()[k - 1], data.coeff(k), alpha, 1.0)))
        .collect();
    Ok(RegularizedSolution::new(
        Method::TikhonovIdentity,
        SolutionParams {
            alpha: Some(alpha),
            bound: Some(bound),
            eps: Some(eps),
            ..Default::default()
        },
        coeffs,
    ))
}

/// `ḡ_k / λ_k` for `k ≤ k_β`.
pub fn truncated_k_beta(
    data: &NoisyDataset,
    es: &EigenSystem,
    bound: f64,
    eps: f64,
) -> Result<RegularizedSolution> {
    check_bound(bound)?;
    let n = components(data, es)?;
    let cut = k_beta(es, bound, eps, n);
    Ok(RegularizedSolution::new(
        Method::KBeta,
        SolutionParams {
            alpha: Some(eps / bound),
            bound: Some(bound),
            eps: Some(eps),
            cutoff: Some(cut),
            ..Default::default()
        },
        unfiltered(data, es, cut),
    ))
}

fn noise_scale(vp: &VarianceProfile, k: usize) -> Result<f64> {
    let s = vp.eps * vp.nu[k - 1];
    if s <= 0.0 {
        return Err(Error::SingularNoise(k));
    }
    Ok(s)
}

/// `λ_k ρ_k² ḡ_k / (λ_k² ρ_k² + ε² ν_k²)`.
pub fn best_linear_estimate(
    data: &NoisyDataset,
    es: &EigenSystem,
    vp: &VarianceProfile,
) -> Result<RegularizedSolution> {
    let n = components(data, es)?;
    vp.covers(n)?;
    let mut coeffs = Vec::with_capacity(n);
    for k in 1..=n {
        let s = noise_scale(vp, k)?;
        let lam = es.eigenvalues()[k - 1];
        let r2 = vp.rho[k - 1] * vp.rho[k - 1];
        coeffs.push((k, lam * r2 * data.coeff(k) / (lam * lam * r2 + s * s)));
    }
    Ok(RegularizedSolution::new(
        Method::Blp,
        SolutionParams {
            eps: Some(vp.eps),
            ..Default::default()
        },
        coeffs,
    ))
}

/// `ε² Σ ρ_k²ν_k² / (λ_k²ρ_k² + ε²ν_k²)`: expected squared error of the best
/// linear estimate over the first `n` components. Diagnostic only.
pub fn blp_global_error(es: &EigenSystem, vp: &VarianceProfile, n: usize) -> Result<f64> {
    vp.covers(n)?;
    es.check_index(n)?;
    let mut total = 0.0;
    for k in 1..=n {
        let s = noise_scale(vp, k)?;
        let lr = es.eigenvalues()[k - 1] * vp.rho[k - 1];
        total += s * s * vp.rho[k - 1] * vp.rho[k - 1] / (lr * lr + s * s);
    }
    Ok(total)
}

/// Information carried by a noisy coefficient about its true counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Information {
    /// `J = ½ ln(1 + λ²ρ²/(ε²ν²))`, in nats.
    pub nats: f64,
    /// Squared correlation ratio `r² = λ²ρ² / (λ²ρ² + ε²ν²)`.
    pub r2: f64,
}

pub fn information_content(lambda: f64, rho: f64, nu: f64, eps: f64) -> Result<Information> {
    let s = eps * nu;
    if !(s > 0.0) {
        return Err(Error::SingularNoise(0));
    }
    let lr = lambda * rho;
    let snr = (lr * lr) / (s * s);
    Ok(Information {
        nats: 0.5 * snr.ln_1p(),
        r2: (lr * lr) / (lr * lr + s * s),
    })
}

/// Components split by whether `λ_k ρ_k ≥ ε ν_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub informative: Vec<usize>,
    pub noise: Vec<usize>,
}

pub fn classify_components(es: &EigenSystem, vp: &VarianceProfile) -> Result<Partition> {
    let n = es.count().min(vp.len());
    let (mut informative, mut noise) = (Vec::new(), Vec::new());
    for k in 1..=n {
        let lr = es.eigenvalues()[k - 1] * vp.rho[k - 1];
        if lr >= vp.eps * vp.nu[k - 1] {
            informative.push(k);
        } else {
            noise.push(k);
        }
    }
    Ok(Partition { informative, noise })
}

impl Partition {
    /// Conditional means: `ḡ_k / λ_k` on informative components, zero elsewhere.
    pub fn conditional_mean(
        &self,
        data: &NoisyDataset,
        es: &EigenSystem,
    ) -> Result<RegularizedSolution> {
        let n = components(data, es)?;
        let coeffs = self
            .informative
            .iter()
            .filter(|&&k| k <= n)
            .map(|&k| (k, data.coeff(k) / es.eigenvalues()[k - 1]))
            .collect();
        Ok(RegularizedSolution::new(
            Method::Bhat,
            SolutionParams::default(),
            coeffs,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensystem::analytic_eigensystem;
    use std::f64::consts::PI;

    fn dataset(coeffs: Vec<f64>, eps: f64) -> NoisyDataset {
        NoisyDataset::from_coefficients(coeffs, eps).unwrap()
    }

    fn lambda(k: usize) -> f64 {
        1.0 / ((k * k) as f64 * PI * PI)
    }

    #[test]
    fn zero_noise_collapses_filters() {
        let es = analytic_eigensystem(8).unwrap();
        let g: Vec<f64> = (1..=8).map(|k| 0.1 * k as f64).collect();
        let d = dataset(g.clone(), 0.0);
        let cs = ConstraintSpec::linear(8, 2.0, 0.0).unwrap();
        let full = tikhonov_full(&d, &es, &cs).unwrap();
        let ident = tikhonov_identity(&d, &es, 2.0, 0.0).unwrap();
        for k in 1..=8 {
            let expect = g[k - 1] / lambda(k);
            assert!((full.coeff(k) - expect).abs() <= 1e-12 * expect.abs());
            assert!((ident.coeff(k) - expect).abs() <= 1e-12 * expect.abs());
        }
        let vp = VarianceProfile::constant(8, 1.0, 1.0, 1e-300).unwrap();
        let blp = best_linear_estimate(&d, &es, &vp).unwrap();
        for k in 1..=8 {
            let expect = g[k - 1] / lambda(k);
            assert!((blp.coeff(k) - expect).abs() <= 1e-12 * expect.abs());
        }
    }

    #[test]
    fn balanced_point_halves_inverse() {
        let es = analytic_eigensystem(3).unwrap();
        // choose E so that λ_2 = (ε/E) c_2
        let eps = 1e-3;
        let bound = eps * 2.0 / lambda(2);
        let cs = ConstraintSpec::linear(3, bound, eps).unwrap();
        let d = dataset(vec![0.3, 0.7, 0.2], eps);
        let s = tikhonov_full(&d, &es, &cs).unwrap();
        let expect = 0.7 / (2.0 * lambda(2));
        assert!((s.coeff(2) - expect).abs() < 1e-12 * expect);

        // identity form: ḡ_1 = λ_1, ε/E = λ_1 → 0.5
        let d = dataset(vec![lambda(1)], 1.0);
        let s = tikhonov_identity(&d, &es, 1.0 / lambda(1), 1.0).unwrap();
        assert!((s.coeff(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_is_full_with_unit_constraint() {
        let es = analytic_eigensystem(16).unwrap();
        let g: Vec<f64> = (0..16).map(|i| ((i * 7 % 5) as f64 - 2.0) * 1e-3).collect();
        let d = dataset(g, 1e-3);
        let unit = ConstraintSpec {
            c: vec![1.0; 16],
            bound: 0.4,
            eps: 2e-4,
        };
        let a = tikhonov_full(&d, &es, &unit).unwrap();
        let b = tikhonov_identity(&d, &es, 0.4, 2e-4).unwrap();
        assert_eq!(a.coeffs, b.coeffs);

        let ka = truncated_k_alpha(&d, &es, &unit).unwrap();
        let kb = truncated_k_beta(&d, &es, 0.4, 2e-4).unwrap();
        assert_eq!(ka.coeffs, kb.coeffs);
        assert_eq!(ka.params.cutoff, kb.params.cutoff);
    }

    #[test]
    fn k_beta_and_empty_truncation() {
        let es = analytic_eigensystem(40).unwrap();
        let d = dataset(vec![1e-3; 40], 0.0);
        let ratio = 1.0 / (100.0 * PI * PI);
        assert_eq!(k_beta(&es, 1.0, ratio, 40), 10);
        let s = truncated_k_beta(&d, &es, 1.0, ratio).unwrap();
        assert_eq!(s.coeffs.len(), 10);

        let huge = truncated_k_beta(&d, &es, 1.0, 1.0).unwrap();
        assert!(huge.coeffs.is_empty());
        let cs = ConstraintSpec::linear(40, 1.0, 1.0).unwrap();
        assert!(truncated_k_alpha(&d, &es, &cs).unwrap().coeffs.is_empty());
    }

    #[test]
    fn degenerate_bounds_rejected() {
        let es = analytic_eigensystem(4).unwrap();
        let d = dataset(vec![1.0; 4], 0.1);
        assert!(matches!(
            ConstraintSpec::linear(4, 0.0, 0.1),
            Err(Error::DegenerateConstraint(_))
        ));
        assert!(ConstraintSpec::new(vec![1.0, 0.0, 3.0], 1.0, 0.1).is_err());
        assert!(ConstraintSpec::new(vec![2.0, 1.0], 1.0, 0.1).is_err());
        assert!(tikhonov_identity(&d, &es, -1.0, 0.1).is_err());
        let vp = VarianceProfile::new(vec![1.0; 4], vec![1.0, 0.0, 1.0, 1.0], 0.1).unwrap();
        assert!(matches!(
            best_linear_estimate(&d, &es, &vp),
            Err(Error::SingularNoise(2))
        ));
    }

    #[test]
    fn blp_reduces_to_identity_form() {
        let es = analytic_eigensystem(64).unwrap();
        let g: Vec<f64> = (1..=64).map(|k| (k as f64).sin() * 1e-3).collect();
        let d = dataset(g, 1e-3);
        let (bound, eps) = (0.7, 3e-4);
        let vp = VarianceProfile::constant(64, bound, 1.0, eps).unwrap();
        let a = best_linear_estimate(&d, &es, &vp).unwrap();
        let b = tikhonov_identity(&d, &es, bound, eps).unwrap();
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((x.1 - y.1).abs() <= 1e-15 * x.1.abs().max(1.0), "{x:?} {y:?}");
        }
    }

    #[test]
    fn blp_zero_prior_kills_component() {
        let es = analytic_eigensystem(3).unwrap();
        let d = dataset(vec![1.0, 1.0, 1.0], 0.1);
        let vp = VarianceProfile::new(vec![1.0, 0.0, 1.0], vec![1.0; 3], 0.1).unwrap();
        let s = best_linear_estimate(&d, &es, &vp).unwrap();
        assert_eq!(s.coeff(2), 0.0);
        assert!(s.coeff(1) > 0.0);
    }

    #[test]
    fn information_values() {
        let i = information_content(0.5, 2.0, 1.0, 1.0).unwrap();
        assert!((i.nats - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((i.r2 - 0.5).abs() < 1e-15);
        assert_eq!(information_content(0.5, 0.0, 1.0, 1.0).unwrap().nats, 0.0);
        let i = information_content(3f64.sqrt(), 1.0, 1.0, 1.0).unwrap();
        assert!((i.nats - 2f64.ln()).abs() < 1e-15);
        assert!(information_content(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(information_content(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn classification_examples() {
        let es = analytic_eigensystem(40).unwrap();
        let vp = VarianceProfile::constant(40, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(classify_components(&es, &vp).unwrap().informative.len(), 40);

        let vp = VarianceProfile::constant(40, 1.0, 1.0, 1.0 / (100.0 * PI * PI)).unwrap();
        let p = classify_components(&es, &vp).unwrap();
        assert_eq!(p.informative, (1..=10).collect::<Vec<_>>());
        assert_eq!(p.noise.len(), 30);

        // inclusive boundary
        let vp = VarianceProfile::constant(3, 1.0, 1.0, lambda(2)).unwrap();
        let es3 = analytic_eigensystem(3).unwrap();
        let p = classify_components(&es3, &vp).unwrap();
        assert_eq!(p.informative, vec![1, 2]);

        let d = dataset(vec![0.1, 0.2, 0.3], 0.0);
        let est = p.conditional_mean(&d, &es3).unwrap();
        assert_eq!(est.coeff(3), 0.0);
        assert!((est.coeff(2) - 0.2 / lambda(2)).abs() < 1e-12);
    }

    #[test]
    fn global_error_is_finite_and_positive() {
        let es = analytic_eigensystem(16).unwrap();
        let vp = VarianceProfile::constant(16, 1.0, 1.0, 1e-3).unwrap();
        let e = blp_global_error(&es, &vp, 16).unwrap();
        assert!(e > 0.0 && e < 16.0);
    }

    #[test]
    fn solution_serialization() {
        let s = RegularizedSolution::new(
            Method::KAlpha,
            SolutionParams {
                cutoff: Some(2),
                ..Default::default()
            },
            vec![(1, 0.5), (2, -1.25)],
        );
        assert_eq!(s.to_csv(), "k,coefficient\n1,5e-1\n2,-1.25e0\n");
        let json = s.to_json().unwrap();
        assert!(json.contains("\"k_alpha\""));
        let back: RegularizedSolution = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(s.dense(3), vec![0.5, -1.25, 0.0]);
        assert_eq!("bhat".parse::<Method>().unwrap(), Method::Bhat);
        assert!("nope".parse::<Method>().is_err());
    }
}
