//! Regularized inversion of Fredholm integral equations of the first kind
//! through eigenfunction expansions.
//!
//! The crate covers the spectral representation of the operator
//! ([`eigensystem`]), test signals and noisy data ([`synthesis`]), the
//! classical variational and Bayesian linear regularizers ([`variational`]),
//! norm-budget truncation ([`spectral_cutoff`]), autocorrelation-driven
//! coefficient selection ([`infoselect`]) and a seeded experiment runner
//! ([`harness`]).

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigensystem;
pub mod error;
pub mod harness;
pub mod infoselect;
pub mod spectral_cutoff;
pub mod synthesis;
pub mod variational;

pub use eigensystem::{
    analytic_eigensystem, analytic_eigensystem_on, numeric_eigensystem, EigenKind, EigenSystem,
    QuadratureGrid, QuadratureRule, TabulatedKernel,
};
pub use error::{Error, Result};
pub use harness::{
    emit_outputs, run_experiment, summarize, ExperimentConfig, RunRecord, Summary,
};
pub use infoselect::{
    build_selection, build_selection_with, AutocorrSeries, MaxLag, SelectionParams,
    SelectionReport,
};
pub use spectral_cutoff::CumulativeProfile;
pub use synthesis::{DispersionMode, NamedSignal, NoiseDomain, NoisyDataset, SignalSpec};
pub use variational::{ConstraintSpec, Method, RegularizedSolution, VarianceProfile};
