use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::run::{Experiment, RunRecord, SeedOutcome};
use super::summary::Summary;
use crate::error::{Error, Result};

pub const CONFIG_FILE: &str = "config.json";
pub const RECORDS_FILE: &str = "records.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub files: Vec<ManifestEntry>,
}

struct Writer {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl Writer {
    fn put(&mut self, rel: &str, contents: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.entries.push(ManifestEntry {
            path: rel.to_string(),
            sha256: hex::encode(Sha256::digest(contents)),
            bytes: contents.len(),
        });
        Ok(())
    }
}

pub fn seed_dir(seed: u64) -> String {
    format!("seed-{seed:04}")
}

/// Grid reconstructions: `x`, `f_true`, then one column per successful method.
fn reconstructions_csv(exp: &Experiment, out: &SeedOutcome) -> Result<String> {
    let mut header = String::from("x,f_true");
    let mut columns = Vec::new();
    for (m, sol) in &out.solutions {
        if let Ok(sol) = sol {
            let _ = write!(header, ",{m}");
            columns.push(sol.reconstruct(&exp.es)?);
        }
    }
    let mut s = header;
    s.push('\n');
    for (i, x) in exp.es.grid().points().iter().enumerate() {
        let _ = write!(s, "{x:e},{:e}", exp.f_true[i]);
        for c in &columns {
            let _ = write!(s, ",{:e}", c[i]);
        }
        s.push('\n');
    }
    Ok(s)
}

fn write_seed(w: &mut Writer, exp: &Experiment, out: &SeedOutcome) -> Result<()> {
    let dir = seed_dir(out.record.seed);
    if let Some(series) = &out.series {
        let n0 = out.record.selection.as_ref().map_or(0, |r| r.n0);
        w.put(
            &format!("{dir}/autocorr.csv"),
            series.to_csv(n0, exp.cfg.selection.z).as_bytes(),
        )?;
    }
    w.put(&format!("{dir}/profile.csv"), out.profile.to_csv().as_bytes())?;
    w.put(
        &format!("{dir}/solutions.csv"),
        reconstructions_csv(exp, out)?.as_bytes(),
    )?;
    w.put(&format!("{dir}/coefficients.csv"), out.data.coeffs_csv().as_bytes())?;
    for (m, sol) in &out.solutions {
        if let Ok(sol) = sol {
            w.put(&format!("{dir}/coeffs-{m}.csv"), sol.to_csv().as_bytes())?;
        }
    }
    let mut report = serde_json::to_string_pretty(&out.record)?;
    report.push('\n');
    w.put(&format!("{dir}/report.json"), report.as_bytes())?;
    Ok(())
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Writes per-seed tables, the config, records, summary and a manifest into
/// `cfg.output_dir`.
///
/// Per-seed artifacts are recomputed from the configuration, which is
/// deterministic, so `records` only needs to carry the seeds to write.
pub fn emit_outputs(
    records: &[RunRecord],
    summary: &Summary,
    cfg: &ExperimentConfig,
) -> Result<Manifest> {
    let root = cfg
        .output_dir
        .clone()
        .ok_or_else(|| Error::Config("output_dir is not set".into()))?;
    fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
    let exp = Experiment::prepare(cfg)?;
    let outcomes: Vec<SeedOutcome> = records
        .par_iter()
        .map(|r| exp.run_seed(r.seed))
        .collect::<Result<_>>()?;

    let mut w = Writer {
        root: root.clone(),
        entries: Vec::new(),
    };
    let mut stored = cfg.clone();
    stored.output_dir = None;
    w.put(CONFIG_FILE, &json_bytes(&stored)?)?;
    for out in &outcomes {
        write_seed(&mut w, &exp, out)?;
    }
    w.put(RECORDS_FILE, &json_bytes(&records)?)?;
    w.put(SUMMARY_FILE, &json_bytes(summary)?)?;

    let manifest = Manifest {
        config_hash: cfg.hash()?,
        files: w.entries,
    };
    let path = root.join(MANIFEST_FILE);
    fs::write(&path, json_bytes(&manifest)?).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Reads `records.json` from an output directory.
pub fn load_records(dir: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = dir.as_ref().join(RECORDS_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(&path, e))
}

pub fn load_manifest(dir: impl AsRef<Path>) -> Result<Manifest> {
    let path = dir.as_ref().join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(&path, e))
}
