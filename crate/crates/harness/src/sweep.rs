use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::record::{ExperimentRecord, FlatRow};
use crate::runner::{run_experiment, RunOptions};

/// First line of every record file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub version: u32,
}

pub const FORMAT: &str = "qimp-records";
pub const VERSION: u32 = 1;

impl Header {
    pub fn current() -> Self {
        Self {
            format: FORMAT.into(),
            version: VERSION,
        }
    }
}

/// Aggregate over the records of one scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeSummary {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub theorem_failures: usize,
    pub max_slack: Option<f64>,
    pub min_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub records_path: PathBuf,
    pub table_path: PathBuf,
    pub schemes: BTreeMap<String, SchemeSummary>,
}

impl SweepSummary {
    pub fn errors(&self) -> usize {
        self.schemes.values().map(|s| s.errors).sum()
    }

    pub fn theorem_failures(&self) -> usize {
        self.schemes.values().map(|s| s.theorem_failures).sum()
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<12} {:>7} {:>6} {:>6} {:>6} {:>12} {:>12}\n",
            "scheme", "records", "pass", "fail", "error", "min slack", "max slack"
        );
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
        for (name, s) in &self.schemes {
            out.push_str(&format!(
                "{:<12} {:>7} {:>6} {:>6} {:>6} {:>12} {:>12}\n",
                name,
                s.records,
                s.passed,
                s.failed,
                s.errors,
                fmt(s.min_slack),
                fmt(s.max_slack)
            ));
        }
        out
    }
}

pub fn summarize<'a>(records: impl IntoIterator<Item = &'a ExperimentRecord>) -> BTreeMap<String, SchemeSummary> {
    let mut out: BTreeMap<String, SchemeSummary> = BTreeMap::new();
    for r in records {
        let s = out.entry(r.scheme.clone()).or_insert(SchemeSummary {
            records: 0,
            passed: 0,
            failed: 0,
            errors: 0,
            theorem_failures: 0,
            max_slack: None,
            min_slack: None,
        });
        s.records += 1;
        match r.passed() {
            Some(true) => s.passed += 1,
            Some(false) => s.failed += 1,
            None => s.errors += 1,
        }
        if r.theorem_failure() {
            s.theorem_failures += 1;
        }
        if let Some(v) = r.slack() {
            s.max_slack = Some(s.max_slack.map_or(v, |m| m.max(v)));
            s.min_slack = Some(s.min_slack.map_or(v, |m| m.min(v)));
        }
    }
    out
}

/// The tabular export sitting next to a record file.
pub fn table_path(records: &Path) -> PathBuf {
    records.with_extension("csv")
}

/// Runs every config and writes one record per line in config order while
/// results arrive, then writes the tabular export.
pub fn sweep(cfgs: &[ExperimentConfig], out: &Path, workers: usize, opts: RunOptions) -> Result<SweepSummary> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let file = File::create(out).map_err(|e| HarnessError::io(out, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| HarnessError::io(out, e);
    serde_json::to_writer(&mut w, &Header::current())?;
    w.write_all(b"\n").map_err(io)?;
    w.flush().map_err(io)?;

    let next = AtomicUsize::new(0);
    let workers = workers.clamp(1, cfgs.len().max(1));
    let mut records = Vec::with_capacity(cfgs.len());
    std::thread::scope(|scope| -> Result<()> {
        let (tx, rx) = mpsc::channel();
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = cfgs.get(i) else { break };
                if tx.send(run_experiment(i, cfg, opts)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut pending = HashMap::new();
        for rec in rx {
            pending.insert(rec.index, rec);
            while let Some(rec) = pending.remove(&records.len()) {
                serde_json::to_writer(&mut w, &rec)?;
                w.write_all(b"\n").map_err(io)?;
                w.flush().map_err(io)?;
                records.push(rec);
            }
        }
        Ok(())
    })?;

    let table = table_path(out);
    write_table(&records, &table)?;
    Ok(SweepSummary {
        records_path: out.to_path_buf(),
        table_path: table,
        schemes: summarize(&records),
    })
}

pub fn write_table(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record([
        "index",
        "scheme",
        "description",
        "n",
        "t",
        "K",
        "epsilon_implied",
        "entropy",
        "distance",
        "bound",
        "relaxed_bound",
        "trace_bound",
        "slack",
        "theorem_backed",
        "pass",
        "error",
    ])?;
    for r in records {
        w.serialize(FlatRow::from(r))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}
