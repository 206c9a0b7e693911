use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qimp::attack::RoundChoice;
use qimp::protocol::StepTrace;

use crate::config::ExperimentConfig;

/// Per-`k` slice of an attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub k: usize,
    pub distance: f64,
    pub trace_bound: f64,
}

/// Everything computed by a successful run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub choice: RoundChoice,
    pub distance: f64,
    pub bound: f64,
    pub relaxed_bound: f64,
    pub trace_bound: f64,
    /// `bound − distance`.
    pub slack: f64,
    pub per_round: Vec<RoundSummary>,
    pub hybrid_distances: Vec<f64>,
    pub hybrid_pinsker: Vec<f64>,
    pub ladder_end_to_end: Option<f64>,
    /// Honest-run instrumentation used to derive `trace_bound`.
    pub traces: Vec<StepTrace>,
    pub metrics: BTreeMap<String, f64>,
    pub theorem_backed: bool,
    pub pass: bool,
}

/// One line of a record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub index: usize,
    pub config: ExperimentConfig,
    pub scheme: String,
    pub description: Option<String>,
    pub n: usize,
    pub t: usize,
    #[serde(rename = "K")]
    pub horizon: Option<usize>,
    pub epsilon_target: Option<f64>,
    pub epsilon_implied: Option<f64>,
    /// `H(X)` of the initial state.
    pub entropy: Option<f64>,
    pub result: Option<Measured>,
    pub error: Option<String>,
    /// Set only when timings are requested, so record files stay reproducible.
    pub wall_time_ms: Option<u64>,
}

impl ExperimentRecord {
    pub fn passed(&self) -> Option<bool> {
        self.result.as_ref().map(|r| r.pass)
    }

    /// A theorem-backed run whose distance exceeded its bound.
    pub fn theorem_failure(&self) -> bool {
        self.result.as_ref().is_some_and(|r| r.theorem_backed && !r.pass)
    }

    pub fn slack(&self) -> Option<f64> {
        self.result.as_ref().map(|r| r.slack)
    }
}

/// Flat row for the tabular export.
#[derive(Debug, Clone, Serialize)]
pub struct FlatRow<'a> {
    pub index: usize,
    pub scheme: &'a str,
    pub description: &'a str,
    pub n: usize,
    pub t: usize,
    #[serde(rename = "K")]
    pub horizon: Option<usize>,
    pub epsilon_implied: Option<f64>,
    pub entropy: Option<f64>,
    pub distance: Option<f64>,
    pub bound: Option<f64>,
    pub relaxed_bound: Option<f64>,
    pub trace_bound: Option<f64>,
    pub slack: Option<f64>,
    pub theorem_backed: Option<bool>,
    pub pass: Option<bool>,
    pub error: &'a str,
}

impl<'a> From<&'a ExperimentRecord> for FlatRow<'a> {
    fn from(r: &'a ExperimentRecord) -> Self {
        let m = r.result.as_ref();
        Self {
            index: r.index,
            scheme: &r.scheme,
            description: r.description.as_deref().unwrap_or(""),
            n: r.n,
            t: r.t,
            horizon: r.horizon,
            epsilon_implied: r.epsilon_implied,
            entropy: r.entropy,
            distance: m.map(|m| m.distance),
            bound: m.map(|m| m.bound),
            relaxed_bound: m.map(|m| m.relaxed_bound),
            trace_bound: m.map(|m| m.trace_bound),
            slack: m.map(|m| m.slack),
            theorem_backed: m.map(|m| m.theorem_backed),
            pass: m.map(|m| m.pass),
            error: r.error.as_deref().unwrap_or(""),
        }
    }
}
