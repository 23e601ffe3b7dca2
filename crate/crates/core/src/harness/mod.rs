//! Seeded Monte-Carlo experiments: configuration, batch execution, summary
//! statistics and file output.

mod config;
mod output;
mod run;
mod summary;

pub use config::{BlpPrior, ExperimentConfig, Seeds, MIN_GRID_SIZE, PRESETS};
pub use output::{
    emit_outputs, load_manifest, load_records, seed_dir, Manifest, ManifestEntry, CONFIG_FILE,
    MANIFEST_FILE, RECORDS_FILE, SUMMARY_FILE,
};
pub use run::{run_experiment, Experiment, MethodOutcome, RunRecord, SeedOutcome};
pub use summary::{median, summarize, MethodSummary, Mode, SelectionSummary, Summary};
