use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BlpPrior, ExperimentConfig};
use crate::eigensystem::{analytic_eigensystem_on, project_all, EigenSystem, QuadratureGrid};
use crate::error::{Error, Result};
use crate::infoselect::{build_selection_with, reconstruct_bhat, AutocorrSeries, SelectionReport};
use crate::spectral_cutoff::{cumulative_profile, f0_approximation, CumulativeProfile};
use crate::synthesis::{
    add_coefficient_noise, add_noise, forward_apply, snr_db, NoiseDomain, NoisyDataset,
};
use crate::variational::{
    best_linear_estimate, k_alpha, k_beta, tikhonov_full, tikhonov_identity, truncated_k_alpha,
    truncated_k_beta, ConstraintSpec, Method, RegularizedSolution, VarianceProfile,
};

/// Relative L² error of one method on one seed, or why it failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub snr_db: Option<f64>,
    pub k_alpha: Option<usize>,
    pub k_beta: Option<usize>,
    pub k0: Option<usize>,
    pub selection: Option<SelectionReport>,
    /// Whether the selected indices equal the signal's known support.
    pub support_match: Option<bool>,
    pub methods: Vec<MethodOutcome>,
    /// Not written to disk, so outputs stay byte-identical across runs.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl RunRecord {
    pub fn outcome(&self, method: Method) -> Option<&MethodOutcome> {
        self.methods.iter().find(|m| m.method == method)
    }

    pub fn rel_error(&self, method: Method) -> Option<f64> {
        self.outcome(method).and_then(|m| m.rel_error)
    }
}

/// Everything computed for one seed, kept for output writing.
#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub record: RunRecord,
    pub data: NoisyDataset,
    pub series: Option<AutocorrSeries>,
    pub profile: CumulativeProfile,
    pub solutions: Vec<(Method, Result<RegularizedSolution, String>)>,
}

/// Seed-independent state of an experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub cfg: ExperimentConfig,
    pub es: EigenSystem,
    /// `f` on the grid.
    pub f_true: Vec<f64>,
    pub f_norm: f64,
    /// `f_k`, `k = 1..=N`.
    pub f_coeffs: Vec<f64>,
    /// `g_k = λ_k f_k`.
    pub g_coeffs: Vec<f64>,
    /// `g` on the grid, only for grid-domain noise.
    pub g_grid: Option<Vec<f64>>,
    pub bound: f64,
    /// Noise level used by the variational and Bayesian formulas.
    pub eps_eff: f64,
    pub c1: f64,
    pub snr_db: Option<f64>,
    pub support: Option<Vec<usize>>,
}

impl Experiment {
    pub fn prepare(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = QuadratureGrid::unit(cfg.grid_size)?;
        let es = analytic_eigensystem_on(grid, cfg.n_coeff)?;
        let f_true = cfg.signal.sample(es.grid())?;
        let f_norm = es.grid().norm(&f_true);
        let f_coeffs = project_all(&f_true, &es, cfg.n_coeff)?;
        let g_coeffs: Vec<f64> = f_coeffs
            .iter()
            .zip(es.eigenvalues())
            .map(|(f, l)| f * l)
            .collect();
        let g_grid = match cfg.noise_domain {
            NoiseDomain::Grid => Some(forward_apply(&cfg.signal, &es)?),
            NoiseDomain::Coefficients => None,
        };
        let bound = cfg.e_override.unwrap_or(f_norm);
        Ok(Experiment {
            // a zero signal has SNR -∞, which JSON cannot carry
            snr_db: if cfg.epsilon > 0.0 {
                Some(snr_db(&g_coeffs, cfg.epsilon)?).filter(|s| s.is_finite())
            } else {
                None
            },
            support: cfg.signal.support(),
            eps_eff: cfg.dispersion_mode.apply(cfg.epsilon),
            c1: cfg.c1_override.unwrap_or(f_norm * f_norm),
            cfg: cfg.clone(),
            es,
            f_true,
            f_norm,
            f_coeffs,
            g_coeffs,
            g_grid,
            bound,
        })
    }

    pub fn dataset(&self, seed: u64) -> Result<NoisyDataset> {
        match &self.g_grid {
            Some(g) => add_noise(g, &self.es, self.cfg.n_coeff, self.cfg.epsilon, seed),
            None => add_coefficient_noise(&self.g_coeffs, &self.es, self.cfg.epsilon, seed),
        }
    }

    pub fn constraint(&self) -> Result<ConstraintSpec> {
        ConstraintSpec::linear(self.cfg.n_coeff, self.bound, self.eps_eff)
    }

    pub fn variance_profile(&self) -> Result<VarianceProfile> {
        let n = self.cfg.n_coeff;
        match &self.cfg.blp_prior {
            BlpPrior::Oracle => VarianceProfile::new(
                self.f_coeffs.iter().map(|f| f.abs()).collect(),
                vec![1.0; n],
                self.eps_eff,
            ),
            BlpPrior::Constraint => {
                let cs = self.constraint()?;
                VarianceProfile::new(
                    cs.c.iter().map(|c| self.bound / c).collect(),
                    vec![1.0; n],
                    self.eps_eff,
                )
            }
            BlpPrior::Explicit { rho, nu } => {
                VarianceProfile::new(rho[..n].to_vec(), nu[..n].to_vec(), self.eps_eff)
            }
        }
    }

    /// `‖f̂ - f‖ / ‖f‖` on the grid; the absolute error when `f = 0`.
    pub fn rel_error(&self, sol: &RegularizedSolution) -> Result<f64> {
        let fhat = sol.reconstruct(&self.es)?;
        let diff: Vec<f64> = fhat.iter().zip(&self.f_true).map(|(a, b)| a - b).collect();
        let err = self.es.grid().norm(&diff);
        Ok(if self.f_norm > 0.0 { err / self.f_norm } else { err })
    }

    fn solve(
        &self,
        method: Method,
        data: &NoisyDataset,
        selection: &Result<SelectionReport>,
    ) -> Result<RegularizedSolution> {
        match method {
            Method::TikhonovFull => tikhonov_full(data, &self.es, &self.constraint()?),
            Method::KAlpha => truncated_k_alpha(data, &self.es, &self.constraint()?),
            Method::TikhonovIdentity => {
                tikhonov_identity(data, &self.es, self.bound, self.eps_eff)
            }
            Method::KBeta => truncated_k_beta(data, &self.es, self.bound, self.eps_eff),
            Method::Blp => best_linear_estimate(data, &self.es, &self.variance_profile()?),
            Method::F0 => f0_approximation(data, &self.es, self.c1),
            Method::Bhat => match selection {
                Ok(report) => reconstruct_bhat(data, &self.es, report),
                Err(e) => Err(Error::DegenerateSequence(e.to_string())),
            },
        }
    }

    pub fn run_seed(&self, seed: u64) -> Result<SeedOutcome> {
        let start = Instant::now();
        let n = self.cfg.n_coeff;
        let data = self.dataset(seed)?;
        let selected = build_selection_with(&data.coeffs, &self.cfg.selection);
        let (selection, series) = match selected {
            Ok((r, s)) => (Ok(r), Some(s)),
            Err(e) => (Err(e), None),
        };
        let profile = cumulative_profile(&data, &self.es)?;

        let mut solutions = Vec::with_capacity(self.cfg.methods.len());
        let mut methods = Vec::with_capacity(self.cfg.methods.len());
        for &method in &self.cfg.methods {
            let solved = self
                .solve(method, &data, &selection)
                .and_then(|s| self.rel_error(&s).map(|e| (s, e)));
            match solved {
                Ok((sol, err)) => {
                    methods.push(MethodOutcome {
                        method,
                        rel_error: Some(err),
                        error: None,
                    });
                    solutions.push((method, Ok(sol)));
                }
                Err(e) => {
                    methods.push(MethodOutcome {
                        method,
                        rel_error: None,
                        error: Some(e.to_string()),
                    });
                    solutions.push((method, Err(e.to_string())));
                }
            }
        }

        let selection = selection.ok();
        let record = RunRecord {
            seed,
            snr_db: self.snr_db,
            k_alpha: self.constraint().ok().map(|cs| k_alpha(&self.es, &cs, n)),
            k_beta: (self.bound > 0.0).then(|| k_beta(&self.es, self.bound, self.eps_eff, n)),
            k0: (self.c1 > 0.0).then(|| profile.cutoff(self.c1)),
            support_match: match (&selection, &self.support) {
                (Some(r), Some(s)) => Some(&r.i_k == s),
                _ => None,
            },
            selection,
            methods,
            wall_time_s: start.elapsed().as_secs_f64(),
        };
        Ok(SeedOutcome {
            record,
            data,
            series,
            profile,
            solutions,
        })
    }
}

/// Runs every seed of `cfg`; seeds run in parallel, records come back in
/// seed-list order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let exp = Experiment::prepare(cfg)?;
    cfg.seeds
        .expand()
        .par_iter()
        .map(|&seed| exp.run_seed(seed).map(|o| o.record))
        .collect()
}
