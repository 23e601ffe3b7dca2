use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::run::RunRecord;
use crate::error::{Error, Result};
use crate::variational::Method;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub runs: usize,
    pub failures: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Most frequent value and how many seeds produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode<T> {
    pub value: T,
    pub count: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub reports: usize,
    pub n0: Mode<usize>,
    #[serde(rename = "Q")]
    pub q: Mode<Vec<usize>>,
    #[serde(rename = "I_k")]
    pub i_k: Mode<Vec<usize>>,
    /// Fraction of seeds whose selected set equals the known support.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub support_match: Option<f64>,
    pub bound_ok: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seeds: usize,
    pub snr_db: Option<f64>,
    pub k_alpha: Option<Mode<usize>>,
    pub k_beta: Option<Mode<usize>>,
    pub k0: Option<Mode<usize>>,
    pub methods: Vec<MethodSummary>,
    pub selection: Option<SelectionSummary>,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Median of a sample; NaN-free input assumed.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(quantile(&v, 0.5))
}

/// Ties go to the smallest value.
fn mode<T: Ord + Clone>(values: impl IntoIterator<Item = T>, total: usize) -> Option<Mode<T>> {
    let mut counts = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_insert(0usize) += 1;
    }
    let mut best: Option<(T, usize)> = None;
    for (v, c) in counts {
        if best.as_ref().is_none_or(|(_, bc)| c > *bc) {
            best = Some((v, c));
        }
    }
    best.map(|(value, count)| Mode {
        value,
        count,
        fraction: count as f64 / total as f64,
    })
}

pub fn summarize(records: &[RunRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::Parameter("cannot summarize an empty batch".into()));
    }
    let n = records.len();

    let mut methods = Vec::new();
    for m in Method::ALL {
        let outcomes: Vec<_> = records.iter().filter_map(|r| r.outcome(m)).collect();
        let mut errs: Vec<f64> = outcomes.iter().filter_map(|o| o.rel_error).collect();
        if errs.is_empty() {
            continue;
        }
        errs.sort_by(f64::total_cmp);
        methods.push(MethodSummary {
            method: m,
            runs: outcomes.len(),
            failures: outcomes.len() - errs.len(),
            median: quantile(&errs, 0.5),
            q1: quantile(&errs, 0.25),
            q3: quantile(&errs, 0.75),
        });
    }

    let reports: Vec<_> = records.iter().filter_map(|r| r.selection.as_ref()).collect();
    let selection = if reports.is_empty() {
        None
    } else {
        let known: Vec<bool> = records.iter().filter_map(|r| r.support_match).collect();
        Some(SelectionSummary {
            reports: reports.len(),
            n0: mode(reports.iter().map(|r| r.n0), reports.len()).expect("nonempty"),
            q: mode(reports.iter().map(|r| r.q.clone()), reports.len()).expect("nonempty"),
            i_k: mode(reports.iter().map(|r| r.i_k.clone()), reports.len()).expect("nonempty"),
            support_match: (!known.is_empty())
                .then(|| known.iter().filter(|&&b| b).count() as f64 / known.len() as f64),
            bound_ok: reports.iter().filter(|r| r.bound_ok).count() as f64 / reports.len() as f64,
        })
    };

    let snrs: Vec<f64> = records.iter().filter_map(|r| r.snr_db).collect();
    Ok(Summary {
        seeds: n,
        snr_db: median(&snrs),
        k_alpha: mode(records.iter().filter_map(|r| r.k_alpha), n),
        k_beta: mode(records.iter().filter_map(|r| r.k_beta), n),
        k0: mode(records.iter().filter_map(|r| r.k0), n),
        methods,
        selection,
    })
}

fn fmt_set(v: &[usize]) -> String {
    let inner: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

impl Summary {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plain-text table for terminals.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "seeds: {}", self.seeds);
        if let Some(snr) = self.snr_db {
            let _ = writeln!(s, "SNR: {snr:.2} dB");
        }
        for (label, m) in [("k_alpha", &self.k_alpha), ("k_beta", &self.k_beta), ("k0", &self.k0)] {
            if let Some(m) = m {
                let _ = writeln!(s, "{label}: {} ({}/{})", m.value, m.count, self.seeds);
            }
        }
        if let Some(sel) = &self.selection {
            let _ = writeln!(s, "n0: {} ({}/{})", sel.n0.value, sel.n0.count, sel.reports);
            let _ = writeln!(s, "Q: {} ({}/{})", fmt_set(&sel.q.value), sel.q.count, sel.reports);
            let _ = writeln!(
                s,
                "I_k: {} ({}/{})",
                fmt_set(&sel.i_k.value),
                sel.i_k.count,
                sel.reports
            );
            if let Some(f) = sel.support_match {
                let _ = writeln!(s, "support match: {:.0}%", 100.0 * f);
            }
        }
        let _ = writeln!(
            s,
            "{:<18} {:>12} {:>12} {:>12} {:>8}",
            "method", "median", "q1", "q3", "failed"
        );
        for m in &self.methods {
            let _ = writeln!(
                s,
                "{:<18} {:>12.4e} {:>12.4e} {:>12.4e} {:>8}",
                m.method.name(),
                m.median,
                m.q1,
                m.q3,
                m.failures
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run::MethodOutcome;
    use crate::infoselect::SelectionReport;

    fn record(seed: u64, err: f64, i_k: Vec<usize>) -> RunRecord {
        RunRecord {
            seed,
            snr_db: Some(3.0),
            k_alpha: Some(8),
            k_beta: Some(11),
            k0: Some(6),
            selection: Some(SelectionReport {
                n0: 2,
                q: vec![1, 2],
                nc: 2,
                pairs: vec![],
                i_k: i_k.clone(),
                compat_ok: true,
                compat_violations: vec![],
                bound_ok: true,
                max_lag: 27,
                z: 1.96,
            }),
            support_match: Some(i_k == vec![1, 2, 3]),
            methods: vec![
                MethodOutcome {
                    method: Method::Bhat,
                    rel_error: Some(err),
                    error: None,
                },
                MethodOutcome {
                    method: Method::Blp,
                    rel_error: None,
                    error: Some("x".into()),
                },
            ],
            wall_time_s: 0.0,
        }
    }

    #[test]
    fn single_record_summary() {
        let s = summarize(&[record(0, 0.25, vec![1, 2, 3])]).unwrap();
        assert_eq!(s.methods.len(), 1);
        let m = &s.methods[0];
        assert_eq!((m.median, m.q1, m.q3), (0.25, 0.25, 0.25));
        assert_eq!(s.k_alpha.as_ref().unwrap().value, 8);
        assert_eq!(s.snr_db, Some(3.0));
        let sel = s.selection.unwrap();
        assert_eq!(sel.i_k.value, vec![1, 2, 3]);
        assert_eq!(sel.support_match, Some(1.0));
    }

    #[test]
    fn quartiles_and_modes() {
        let recs: Vec<_> = (0..5)
            .map(|i| {
                let set = if i < 3 { vec![1, 2, 3] } else { vec![1, 2] };
                record(i, i as f64, set)
            })
            .collect();
        let s = summarize(&recs).unwrap();
        let m = &s.methods[0];
        assert_eq!((m.median, m.q1, m.q3), (2.0, 1.0, 3.0));
        let sel = s.selection.unwrap();
        assert_eq!(sel.i_k.count, 3);
        assert!((sel.support_match.unwrap() - 0.6).abs() < 1e-15);
        assert!(summarize(&[]).is_err());
        assert!(s_table_has_rows(&summarize(&recs).unwrap()));
    }

    fn s_table_has_rows(s: &Summary) -> bool {
        let t = s.table();
        t.contains("bhat") && !t.contains("blp") && t.contains("I_k: {1,2,3}")
    }

    #[test]
    fn mode_ties_pick_smallest() {
        let m = mode([3, 1, 3, 1], 4).unwrap();
        assert_eq!((m.value, m.count), (1, 2));
    }
}
