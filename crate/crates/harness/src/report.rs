use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Serialize;

use qimp::attack::{distance_bound, RoundChoice};
use qimp::tol;

use crate::error::{HarnessError, Result};
use crate::record::ExperimentRecord;
use crate::sweep::{Header, FORMAT, VERSION};

/// Tolerance for recomputed quantities.
const RECOMPUTE: f64 = 1e-9;

/// Reads a record file; errors name the offending line.
pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let parse = |line: usize, message: String| HarnessError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut out = Vec::new();
    let mut header = false;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        let no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if !header {
            let h: Header = serde_json::from_str(&line).map_err(|e| parse(no, format!("bad header: {e}")))?;
            if h.format != FORMAT || h.version != VERSION {
                return Err(parse(no, format!("unsupported format {} v{}", h.format, h.version)));
            }
            header = true;
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| parse(no, e.to_string()))?);
    }
    if !header {
        return Err(parse(1, "missing header".into()));
    }
    Ok(out)
}

/// Inconsistencies between a record's stored numbers and what its traces imply.
pub fn cross_check(r: &ExperimentRecord) -> Vec<String> {
    let mut issues = Vec::new();
    let (Some(m), Some(horizon), Some(entropy)) = (&r.result, r.horizon, r.entropy) else {
        return issues;
    };
    let mut near = |name: &str, stored: f64, derived: f64| {
        if (stored - derived).abs() > RECOMPUTE {
            issues.push(format!("{name}: stored {stored}, derived {derived}"));
        }
    };
    near("bound", m.bound, distance_bound(r.t, entropy, horizon));
    near("relaxed_bound", m.relaxed_bound, distance_bound(r.t, r.n as f64, horizon));
    near("slack", m.slack, m.bound - m.distance);
    let ks: Vec<usize> = match m.choice {
        RoundChoice::Uniform => (1..=horizon).collect(),
        RoundChoice::Fixed(k) => vec![k],
    };
    let t = r.t;
    let term = |c: f64| (c.max(0.0) / (2.0 * std::f64::consts::LN_2)).sqrt();
    let per_k = |k: usize| -> Option<f64> {
        let steps = m.traces.get(k * t..(k + 1) * t)?;
        Some(steps.iter().map(|s| term(s.cmi_yq) + term(s.cmi_xa)).sum())
    };
    match ks.iter().map(|&k| per_k(k)).sum::<Option<f64>>() {
        Some(total) => near("trace_bound", m.trace_bound, total / ks.len() as f64),
        None => issues.push("traces too short for the recorded horizon".into()),
    }
    if m.pass != (m.distance <= m.bound + tol::INEQUALITY) {
        issues.push("pass flag disagrees with distance and bound".into());
    }
    if m.theorem_backed {
        if m.distance > m.trace_bound + tol::INEQUALITY {
            issues.push(format!("distance {} exceeds trace bound {}", m.distance, m.trace_bound));
        }
        let yq: f64 = m.traces.iter().map(|s| s.cmi_yq).sum();
        let xa: f64 = m.traces.iter().map(|s| s.cmi_xa).sum();
        if yq > entropy + 1e-6 || xa > entropy + 1e-6 {
            issues.push(format!("information sums {yq}, {xa} exceed H(X) = {entropy}"));
        }
    }
    issues
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub index: usize,
    pub scheme: String,
    pub n: usize,
    pub t: usize,
    #[serde(rename = "K")]
    pub horizon: Option<usize>,
    pub epsilon_implied: Option<f64>,
    pub distance: Option<f64>,
    pub bound: Option<f64>,
    pub slack: Option<f64>,
    pub pass: Option<bool>,
    pub theorem_backed: bool,
    pub error: Option<String>,
    pub issues: Vec<String>,
}

/// Machine-readable totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub theorem_failures: usize,
    pub inconsistent: usize,
    pub min_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    /// Sorted by slack ascending; records without a result come last.
    pub rows: Vec<ReportRow>,
    pub summary: ReportSummary,
}

impl Report {
    /// Whether any theorem-backed record failed or disagrees with its own traces.
    pub fn failed(&self) -> bool {
        self.summary.theorem_failures > 0 || self.summary.inconsistent > 0
    }

    pub fn render(&self) -> String {
        let opt = |v: Option<f64>, p: usize| v.map_or_else(|| "-".to_string(), |v| format!("{v:.p$}"));
        let mut out = format!(
            "{:<12} {:>3} {:>3} {:>5} {:>10} {:>10} {:>10} {:>10} {:>5}\n",
            "scheme", "n", "t", "K", "eps", "distance", "bound", "slack", "pass"
        );
        for r in &self.rows {
            let pass = match (r.pass, r.theorem_backed) {
                (Some(true), _) => "yes",
                (Some(false), true) => "NO",
                (Some(false), false) => "diag",
                (None, _) => "err",
            };
            out.push_str(&format!(
                "{:<12} {:>3} {:>3} {:>5} {:>10} {:>10} {:>10} {:>10} {:>5}\n",
                r.scheme,
                r.n,
                r.t,
                r.horizon.map_or_else(|| "-".to_string(), |k| k.to_string()),
                opt(r.epsilon_implied, 6),
                opt(r.distance, 6),
                opt(r.bound, 6),
                opt(r.slack, 6),
                pass
            ));
            if let Some(e) = &r.error {
                out.push_str(&format!("    error: {e}\n"));
            }
            for i in &r.issues {
                out.push_str(&format!("    inconsistent: {i}\n"));
            }
        }
        out
    }
}

pub fn report(records: &[ExperimentRecord]) -> Report {
    let mut rows: Vec<ReportRow> = records
        .iter()
        .map(|r| {
            let m = r.result.as_ref();
            ReportRow {
                index: r.index,
                scheme: r.scheme.clone(),
                n: r.n,
                t: r.t,
                horizon: r.horizon,
                epsilon_implied: r.epsilon_implied,
                distance: m.map(|m| m.distance),
                bound: m.map(|m| m.bound),
                slack: m.map(|m| m.slack),
                pass: m.map(|m| m.pass),
                theorem_backed: m.is_some_and(|m| m.theorem_backed),
                error: r.error.clone(),
                issues: cross_check(r),
            }
        })
        .collect();
    rows.sort_by(|a, b| match (a.slack, b.slack) {
        (Some(x), Some(y)) => x.total_cmp(&y).then(a.index.cmp(&b.index)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.index.cmp(&b.index),
    });
    let summary = ReportSummary {
        records: rows.len(),
        passed: rows.iter().filter(|r| r.pass == Some(true)).count(),
        failed: rows.iter().filter(|r| r.pass == Some(false)).count(),
        errors: rows.iter().filter(|r| r.pass.is_none()).count(),
        theorem_failures: rows.iter().filter(|r| r.theorem_backed && r.pass == Some(false)).count(),
        inconsistent: rows.iter().filter(|r| !r.issues.is_empty()).count(),
        min_slack: rows.iter().filter_map(|r| r.slack).min_by(f64::total_cmp),
    };
    Report { rows, summary }
}
