//! The interaction engine: rounds of `t` query/answer exchanges between Alice and Bob.
//!
//! At every step the current message register `Q` is measured, Bob applies his
//! isometry `Y → Y A` and his answer `A` is measured, then Alice applies her
//! isometry `X → X Q` to produce the next message. Both parties' isometries are
//! chosen classically from the transcript so far. Message registers never
//! outlive their measurement; the outcomes live in branch keys.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cq::{Branch, CqState, Distribution, Symbol, Transcript};
use crate::error::{Error, Result};
use crate::qcore::{bits, DensityOperator, Ensemble, Isometry, Owner, PureState, Register};
use crate::tol;

/// Name of Alice's message register.
pub const QUERY: &str = "Q";
/// Name of Bob's answer register.
pub const ANSWER: &str = "A";

/// The behavior of both parties.
///
/// Steps are numbered globally from 1; step `i` belongs to round `⌈i/t⌉`.
/// `alice_update(i, T_i)` produces `Q_{i+1}` from Alice's registers after
/// seeing the first `i` exchanges (`alice_update(0, ∅)` produces `Q_1`), and
/// `bob_update(i, T)` produces the answer `A_i` once `T` ends with `q_i`.
pub trait ProtocolRules: Send + Sync + fmt::Debug {
    /// Initial pure state on Alice's and Bob's registers.
    fn initial_state(&self) -> Result<PureState>;

    fn query_width(&self) -> usize;

    fn answer_width(&self) -> usize;

    fn alice_update(&self, step: usize, transcript: &Transcript) -> Result<Isometry>;

    fn bob_update(&self, step: usize, transcript: &Transcript) -> Result<Isometry>;

    /// Summary of `T_step` that determines every later isometry together with
    /// the symbols exchanged after it. Branches with equal memory and equal
    /// state behave identically from then on and may be merged.
    fn memory(&self, step: usize, transcript: &Transcript) -> String {
        let _ = step;
        transcript.key()
    }
}

/// A validated protocol instance.
#[derive(Debug, Clone)]
pub struct ProtocolSpec {
    name: String,
    description: String,
    t: usize,
    max_rounds: usize,
    rules: Arc<dyn ProtocolRules>,
    initial: PureState,
    alice: Vec<String>,
    bob: Vec<String>,
}

impl ProtocolSpec {
    pub fn new(
        name: impl Into<String>,
        description: impl Into<String>,
        t: usize,
        max_rounds: usize,
        qubit_cap: usize,
        rules: Arc<dyn ProtocolRules>,
    ) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidConfig("t must be at least 1".into()));
        }
        let qw = rules.query_width();
        let aw = rules.answer_width();
        if qw == 0 || aw == 0 {
            return Err(Error::InvalidConfig("message widths must be at least 1".into()));
        }
        let (layout, amps) = rules.initial_state()?.into_parts();
        let needed = layout.total_width() + qw.max(aw);
        if needed > qubit_cap {
            return Err(Error::QubitCapExceeded { needed, cap: qubit_cap });
        }
        let layout = layout.with_new_cap(qubit_cap)?;
        let mut alice = Vec::new();
        let mut bob = Vec::new();
        for r in layout.registers() {
            match r.owner {
                Owner::Alice => alice.push(r.name.clone()),
                Owner::Bob => bob.push(r.name.clone()),
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "initial register `{}` must belong to Alice or Bob",
                        r.name
                    )))
                }
            }
        }
        if alice.is_empty() {
            return Err(Error::InvalidConfig("Alice holds no qubits".into()));
        }
        if layout.contains(QUERY) || layout.contains(ANSWER) {
            return Err(Error::NameCollision(format!("{QUERY}/{ANSWER}")));
        }
        Ok(Self {
            name: name.into(),
            description: description.into(),
            t,
            max_rounds,
            rules,
            initial: PureState::new(layout, amps)?,
            alice,
            bob,
        })
    }

    /// The same protocol validated against another qubit cap.
    pub fn with_qubit_cap(&self, qubit_cap: usize) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.description.clone(),
            self.t,
            self.max_rounds,
            qubit_cap,
            self.rules.clone(),
        )
    }

    pub fn qubit_cap(&self) -> usize {
        self.initial.layout().cap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Messages per round.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn max_rounds(&self) -> usize {
        self.max_rounds
    }

    pub(crate) fn shared_rules(&self) -> Arc<dyn ProtocolRules> {
        self.rules.clone()
    }

    pub fn rules(&self) -> &dyn ProtocolRules {
        self.rules.as_ref()
    }

    pub fn initial_state(&self) -> &PureState {
        &self.initial
    }

    /// Qubits held by Alice.
    pub fn n(&self) -> usize {
        self.alice_registers().iter().map(|r| r.width).sum()
    }

    pub fn alice(&self) -> &[String] {
        &self.alice
    }

    pub fn bob(&self) -> &[String] {
        &self.bob
    }

    pub fn alice_registers(&self) -> Vec<Register> {
        let l = self.initial.layout();
        self.alice.iter().map(|n| l.register(n).expect("own register").clone()).collect()
    }

    pub fn bob_registers(&self) -> Vec<Register> {
        let l = self.initial.layout();
        self.bob.iter().map(|n| l.register(n).expect("own register").clone()).collect()
    }

    /// Alice's registers plus the pending message.
    pub fn alice_with_query(&self) -> Vec<String> {
        let mut v = self.alice.clone();
        v.push(QUERY.to_string());
        v
    }

    /// `H(X)` of the initial state.
    pub fn initial_entropy(&self) -> f64 {
        Ensemble::pure(self.initial.clone())
            .entropy(&self.alice)
            .expect("own registers")
    }

    pub fn round_of(&self, step: usize) -> usize {
        step.div_ceil(self.t)
    }
}

/// Knobs of the enumeration engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineOptions {
    pub branch_cap: usize,
    /// Merge branches with equal memory and equal state.
    pub lump: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            branch_cap: 1 << 19,
            lump: true,
        }
    }
}

/// Per-step entropy instrumentation of an honest run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub step: usize,
    /// `H(X Q_{i+1} | T_i)` after the step.
    pub h_x_given_transcript: f64,
    /// `H(X | T_{i−1} q_i)` right after the query is measured.
    pub h_x_after_query: f64,
    /// `I(Y; Q_i | T_{i−1})` before the query is measured.
    pub cmi_yq: f64,
    /// `I(X; A_i | T_{i−1} q_i)` before the answer is measured.
    pub cmi_xa: f64,
}

/// Where a decoupling intervention acts inside a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    BeforeQuery,
    AfterQuery,
}

/// Decouple `registers` from the rest of every branch at the given point of a round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Intervention {
    /// Zero-based step inside the round.
    pub step_in_round: usize,
    pub phase: Phase,
    pub registers: Vec<String>,
}

/// First violation of monotonicity, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monotonicity {
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// Checks that `h_x_given_transcript` never increases by more than the tolerance.
pub fn entropy_trace_monotone(traces: &[StepTrace]) -> Monotonicity {
    for w in traces.windows(2) {
        if w[1].h_x_given_transcript > w[0].h_x_given_transcript + tol::INEQUALITY {
            return Monotonicity {
                holds: false,
                first_violation: Some(w[1].step),
            };
        }
    }
    Monotonicity {
        holds: true,
        first_violation: None,
    }
}

/// Single-branch state `alice_update(0) |ψ_0⟩`.
pub fn init(spec: &ProtocolSpec) -> Result<CqState> {
    let v = spec.rules.alice_update(0, &Transcript::new())?;
    let state = Ensemble::pure(spec.initial.clone()).apply(&v)?;
    Ok(CqState::single(state))
}

fn query_branch(spec: &ProtocolSpec, b: &Branch) -> Result<Vec<Branch>> {
    let qw = spec.rules.query_width();
    Ok(b.state
        .measure(QUERY)?
        .into_iter()
        .map(|(v, p, e)| Branch {
            transcript: b.transcript.with(Symbol::query(bits(v, qw))),
            weight: b.weight * p,
            state: e,
        })
        .collect())
}

fn bob_apply(spec: &ProtocolSpec, step: usize, b: &Branch) -> Result<Ensemble> {
    let v = spec.rules.bob_update(step, &b.transcript)?;
    b.state.apply(&v)
}

fn answer_branches(spec: &ProtocolSpec, b: &Branch, applied: Ensemble) -> Result<Vec<Branch>> {
    let aw = spec.rules.answer_width();
    Ok(applied
        .measure(ANSWER)?
        .into_iter()
        .map(|(v, p, e)| Branch {
            transcript: b.transcript.with(Symbol::answer(bits(v, aw))),
            weight: b.weight * p,
            state: e,
        })
        .collect())
}

fn alice_branch(spec: &ProtocolSpec, step: usize, b: Branch) -> Result<Branch> {
    let v = spec.rules.alice_update(step, &b.transcript)?;
    Ok(Branch {
        state: b.state.apply(&v)?,
        ..b
    })
}

/// Accumulates branches, optionally merging equivalent ones.
struct Collector<'a> {
    spec: &'a ProtocolSpec,
    step: usize,
    cap: usize,
    lump: bool,
    map: BTreeMap<String, Branch>,
    index: HashMap<(String, Vec<i64>), String>,
}

impl<'a> Collector<'a> {
    fn new(spec: &'a ProtocolSpec, step: usize, opts: &EngineOptions, lump: bool) -> Self {
        Self {
            spec,
            step,
            cap: opts.branch_cap,
            lump,
            map: BTreeMap::new(),
            index: HashMap::new(),
        }
    }

    fn add(&mut self, b: Branch) -> Result<()> {
        let key = b.transcript.key();
        if self.lump {
            if let Some(fp) = b.state.fingerprint() {
                let memory = self.spec.rules.memory(self.step, &b.transcript);
                match self.index.get(&(memory.clone(), fp.clone())) {
                    Some(rep) => {
                        self.map.get_mut(rep).expect("indexed branch").weight += b.weight;
                        return Ok(());
                    }
                    None => {
                        self.index.insert((memory, fp), key.clone());
                    }
                }
            }
        }
        self.map.insert(key, b);
        if self.map.len() > self.cap {
            return Err(Error::BranchCapExceeded {
                step: self.step,
                branches: self.map.len(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    fn finish(self, like: &CqState) -> CqState {
        let layout = self
            .map
            .values()
            .next()
            .map(|b| b.state.layout().clone())
            .unwrap_or_else(|| like.layout().clone());
        CqState::from_map(layout, self.map)
    }
}

/// Measures `Q_i` in every branch.
pub fn query_phase(spec: &ProtocolSpec, s: &CqState, step: usize, opts: &EngineOptions) -> Result<CqState> {
    let mut out = Collector::new(spec, step, opts, false);
    for b in s.branches() {
        for c in query_branch(spec, b)? {
            out.add(c)?;
        }
    }
    Ok(out.finish(s))
}

/// Bob's isometry followed by measuring `A_i`.
pub fn bob_phase(spec: &ProtocolSpec, s: &CqState, step: usize, opts: &EngineOptions) -> Result<CqState> {
    let mut out = Collector::new(spec, step, opts, false);
    for b in s.branches() {
        let applied = bob_apply(spec, step, b)?;
        for c in answer_branches(spec, b, applied)? {
            out.add(c)?;
        }
    }
    Ok(out.finish(s))
}

/// Alice's isometry producing `Q_{i+1}`; merges equivalent branches when `opts.lump`.
pub fn alice_phase(spec: &ProtocolSpec, s: &CqState, step: usize, opts: &EngineOptions) -> Result<CqState> {
    let mut out = Collector::new(spec, step, opts, opts.lump);
    for b in s.branches() {
        out.add(alice_branch(spec, step, b.clone())?)?;
    }
    Ok(out.finish(s))
}

/// One full step without instrumentation.
pub fn step(spec: &ProtocolSpec, s: &CqState, i: usize, opts: &EngineOptions) -> Result<CqState> {
    let s = query_phase(spec, s, i, opts)?;
    let s = bob_phase(spec, &s, i, opts)?;
    alice_phase(spec, &s, i, opts)
}

/// One full step with entropy instrumentation.
pub fn step_traced(spec: &ProtocolSpec, s: &CqState, i: usize, opts: &EngineOptions) -> Result<(CqState, StepTrace)> {
    let mut out = Collector::new(spec, i, opts, opts.lump);
    let mut trace = StepTrace {
        step: i,
        h_x_given_transcript: 0.0,
        h_x_after_query: 0.0,
        cmi_yq: 0.0,
        cmi_xa: 0.0,
    };
    for b in s.branches() {
        trace.cmi_yq += b.weight * b.state.entropy(&spec.bob)?;
        for c in query_branch(spec, b)? {
            let hy = c.state.entropy(&spec.bob)?;
            let hx = c.state.entropy(&spec.alice)?;
            trace.cmi_yq -= c.weight * hy;
            trace.h_x_after_query += c.weight * hx;
            trace.cmi_xa += c.weight * hx;
            let applied = bob_apply(spec, i, &c)?;
            for g in answer_branches(spec, &c, applied)? {
                trace.cmi_xa -= g.weight * g.state.entropy(&spec.alice)?;
                let g = alice_branch(spec, i, g)?;
                trace.h_x_given_transcript += g.weight * g.state.entropy(&spec.alice_with_query())?;
                out.add(g)?;
            }
        }
    }
    Ok((out.finish(s), trace))
}

/// Honest run over whole rounds.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// `snapshots[r]` is the state after `r` rounds, for the rounds that were kept.
    pub snapshots: Vec<CqState>,
    pub last: CqState,
    pub traces: Vec<StepTrace>,
}

/// Runs `rounds` rounds with instrumentation.
pub fn run(spec: &ProtocolSpec, rounds: usize, opts: &EngineOptions) -> Result<(CqState, Vec<StepTrace>)> {
    let out = run_snapshots(spec, rounds, 0, opts)?;
    Ok((out.last, out.traces))
}

/// Runs `rounds` rounds, keeping the states after rounds `0..=keep_upto`.
pub fn run_snapshots(spec: &ProtocolSpec, rounds: usize, keep_upto: usize, opts: &EngineOptions) -> Result<RunOutput> {
    if rounds > spec.max_rounds {
        return Err(Error::InvalidConfig(format!(
            "{rounds} rounds requested, spec allows {}",
            spec.max_rounds
        )));
    }
    let mut s = init(spec)?;
    let mut snapshots = vec![s.clone()];
    let mut traces = Vec::with_capacity(rounds * spec.t);
    for r in 1..=rounds {
        for j in 1..=spec.t {
            let (next, tr) = step_traced(spec, &s, (r - 1) * spec.t + j, opts)?;
            s = next;
            traces.push(tr);
        }
        if r <= keep_upto {
            snapshots.push(s.clone());
        }
    }
    Ok(RunOutput {
        snapshots,
        last: s,
        traces,
    })
}

/// Runs round `round` from `s` (the state after round `round − 1`) with the
/// given interventions, and returns the classical distribution over full keys.
pub fn round_distribution(
    spec: &ProtocolSpec,
    s: &CqState,
    round: usize,
    interventions: &[Intervention],
    opts: &EngineOptions,
) -> Result<Distribution> {
    Ok(round_state(spec, s, round, interventions, opts)?.classical_marginal())
}

pub(crate) fn round_state(
    spec: &ProtocolSpec,
    s: &CqState,
    round: usize,
    interventions: &[Intervention],
    opts: &EngineOptions,
) -> Result<CqState> {
    let plain = EngineOptions { lump: false, ..*opts };
    let mut s = s.clone();
    for j in 0..spec.t {
        let i = (round - 1) * spec.t + j + 1;
        for iv in interventions.iter().filter(|iv| iv.step_in_round == j && iv.phase == Phase::BeforeQuery) {
            s = s.replace_subsystem(&iv.registers)?;
        }
        s = query_phase(spec, &s, i, &plain)?;
        for iv in interventions.iter().filter(|iv| iv.step_in_round == j && iv.phase == Phase::AfterQuery) {
            s = s.replace_subsystem(&iv.registers)?;
        }
        s = bob_phase(spec, &s, i, &plain)?;
        s = alice_phase(spec, &s, i, &plain)?;
    }
    Ok(s)
}

/// Conditional state of Alice's registers and the pending message given a
/// transcript of whole steps.
pub fn posterior(spec: &ProtocolSpec, transcript: &Transcript, opts: &EngineOptions) -> Result<DensityOperator> {
    if !transcript.len().is_multiple_of(2) {
        return Err(Error::InvalidConfig("posterior needs a transcript of whole steps".into()));
    }
    let plain = EngineOptions { lump: false, ..*opts };
    let keep = |s: CqState, upto: usize| -> Result<CqState> {
        let prefix = Transcript::from_symbols(transcript.symbols()[..upto].to_vec());
        let branches: BTreeMap<String, Branch> = s
            .into_branches()
            .filter(|b| prefix.is_prefix_of(&b.transcript))
            .map(|b| (b.transcript.key(), b))
            .collect();
        if branches.is_empty() {
            return Err(Error::ZeroProbability(prefix.to_string()));
        }
        let layout = branches.values().next().expect("non-empty").state.layout().clone();
        Ok(CqState::from_map(layout, branches))
    };
    let mut s = init(spec)?;
    for i in 1..=transcript.len() / 2 {
        s = keep(query_phase(spec, &s, i, &plain)?, 2 * i - 1)?;
        s = keep(bob_phase(spec, &s, i, &plain)?, 2 * i)?;
        s = alice_phase(spec, &s, i, &plain)?;
    }
    let total = s.total_weight();
    if total < tol::PRUNE {
        return Err(Error::ZeroProbability(transcript.to_string()));
    }
    let rho = s.quantum_marginal(&spec.alice_with_query())?.average_unnormalized();
    rho.normalized()
}
