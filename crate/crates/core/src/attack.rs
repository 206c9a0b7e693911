//! The passive-then-forge adversary.
//!
//! Eve listens to `k` honest rounds, then replaces Alice's registers and her
//! pending message with a fresh sample of their conditional state given the
//! transcript, and Bob talks to that sample for one round. Everything is exact:
//! the posterior is obtained by conditioning the engine's cq state and the
//! choice of `k` is mixed with weight `1/K` rather than sampled.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cq::{Branch, CqState, Distribution};
use crate::error::{Error, Result};
use crate::infomeasures::{pinsker_check, statistical_distance};
use crate::protocol::{
    query_phase, bob_phase, alice_phase, round_distribution, round_state, run_snapshots, EngineOptions, Intervention,
    Phase, ProtocolSpec, StepTrace, ANSWER, QUERY,
};
use crate::qcore::{dephase, DensityOperator, Ensemble, PureState, Register};
use crate::schemes::{accept_projector, slot, ToyMoneyScheme};
use crate::tol;

/// Number of passive rounds and, when it was derived from one, the target distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub horizon: usize,
    pub epsilon_target: Option<f64>,
}

impl AttackConfig {
    pub fn with_horizon(horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        Ok(Self {
            horizon,
            epsilon_target: None,
        })
    }

    /// `K = ⌈2nt/(ε² ln 2)⌉`.
    pub fn from_epsilon(n: usize, t: usize, epsilon: f64) -> Result<Self> {
        Ok(Self {
            horizon: required_rounds(n, t, epsilon)?,
            epsilon_target: Some(epsilon),
        })
    }

    pub fn implied_epsilon(&self, n: usize, t: usize) -> f64 {
        implied_epsilon(n, t, self.horizon)
    }
}

/// `⌈2nt/(ε² ln 2)⌉`.
pub fn required_rounds(n: usize, t: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidConfig(format!("epsilon {epsilon} is not in (0,1)")));
    }
    let k = (2.0 * (n * t) as f64 / (epsilon * epsilon * std::f64::consts::LN_2)).ceil();
    Ok((k as usize).max(1))
}

/// The `ε` for which `K` rounds suffice: `√(2nt/(K ln 2))`.
pub fn implied_epsilon(n: usize, t: usize, horizon: usize) -> f64 {
    distance_bound(t, n as f64, horizon)
}

/// `√(2t·H/(K ln 2))`; with `H = n` this is the relaxed bound.
pub fn distance_bound(t: usize, entropy: f64, horizon: usize) -> f64 {
    (2.0 * t as f64 * entropy.max(0.0) / (horizon as f64 * std::f64::consts::LN_2)).sqrt()
}

/// How Eve picks the number of passive rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoundChoice {
    /// Uniform over `1..=K`.
    Uniform,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackOptions {
    pub engine: EngineOptions,
    /// Keep the joint `(k, transcript)` distributions in the outcome.
    pub keep_distributions: bool,
    /// Also build the hybrid ladder for each `k`.
    pub ladder: bool,
    /// Worker threads over `k`.
    pub threads: usize,
}

impl Default for AttackOptions {
    fn default() -> Self {
        Self {
            engine: EngineOptions::default(),
            keep_distributions: false,
            ladder: false,
            threads: 1,
        }
    }
}

/// Distance between two adjacent hybrids and the Pinsker-side quantities that bound it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridStep {
    pub from: String,
    pub to: String,
    pub distance: f64,
    /// Expected distance of the relevant joint from the product of its marginals.
    pub expected_delta: f64,
    /// Expected `√(I/(2 ln 2))` over branches.
    pub pinsker_bound: f64,
}

/// Adjacent steps from `Hyb_0` to `Hyb_t` plus the distance between the endpoints.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HybridLadder {
    pub steps: Vec<HybridStep>,
    pub end_to_end: f64,
}

/// Result for one value of `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub k: usize,
    pub distance: f64,
    /// `Σ √(cmi/(2 ln 2))` over the steps of the forged round.
    pub trace_bound: f64,
    pub ladder: Option<HybridLadder>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackOutcome {
    pub choice: RoundChoice,
    pub horizon: usize,
    /// Distance between the real and forged joint `(k, transcript)` distributions.
    pub distance: f64,
    /// `√(2t·H(X)/(K ln 2))`.
    pub bound: f64,
    /// `√(2tn/(K ln 2))`.
    pub relaxed_bound: f64,
    /// Mean over `k` of the per-round trace-derived bound.
    pub trace_bound: f64,
    pub per_round: Vec<RoundOutcome>,
    pub real_distribution: Option<Distribution>,
    pub forged_distribution: Option<Distribution>,
    /// Adjacent hybrid distances averaged over `k` (empty without a ladder).
    pub per_hybrid_distances: Vec<f64>,
    pub per_hybrid_pinsker: Vec<f64>,
    /// Instrumentation of the honest run through round `K+1` (or `k+1`).
    pub traces: Vec<StepTrace>,
}

impl AttackOutcome {
    /// Whether the guarantee of the uniform-`k` analysis applies to this run.
    pub fn theorem_backed(&self) -> bool {
        self.choice == RoundChoice::Uniform
    }

    pub fn within_bound(&self) -> bool {
        self.distance <= self.bound + tol::INEQUALITY
    }

    /// Mean over `k` of the end-to-end distance through the ladder.
    pub fn ladder_end_to_end(&self) -> Option<f64> {
        let total = self
            .per_round
            .iter()
            .map(|r| r.ladder.as_ref().map(|l| l.end_to_end))
            .sum::<Option<f64>>()?;
        Some(total / self.per_round.len() as f64)
    }
}

fn forge(spec: &ProtocolSpec) -> Intervention {
    Intervention {
        step_in_round: 0,
        phase: Phase::BeforeQuery,
        registers: spec.alice_with_query(),
    }
}

fn ks_for(choice: RoundChoice, horizon: usize) -> Result<Vec<usize>> {
    match choice {
        RoundChoice::Uniform => Ok((1..=horizon).collect()),
        RoundChoice::Fixed(k) if (1..=horizon).contains(&k) => Ok(vec![k]),
        RoundChoice::Fixed(k) => Err(Error::InvalidConfig(format!("k={k} is outside 1..={horizon}"))),
    }
}

fn trace_bound(traces: &[StepTrace], spec: &ProtocolSpec, k: usize) -> f64 {
    let t = spec.t();
    let term = |c: f64| (c.max(0.0) / (2.0 * std::f64::consts::LN_2)).sqrt();
    traces[k * t..(k + 1) * t]
        .iter()
        .map(|s| term(s.cmi_yq) + term(s.cmi_xa))
        .sum()
}

/// Runs the forgery exactly and compares it with the honest round.
pub fn impersonate(
    spec: &ProtocolSpec,
    cfg: &AttackConfig,
    choice: RoundChoice,
    opts: &AttackOptions,
) -> Result<AttackOutcome> {
    let ks = ks_for(choice, cfg.horizon)?;
    let kmax = *ks.last().expect("at least one k");
    let honest = run_snapshots(spec, kmax + 1, kmax, &opts.engine)?;

    let one = |k: usize| -> Result<(RoundOutcome, Distribution, Distribution)> {
        let s = &honest.snapshots[k];
        let real = round_distribution(spec, s, k + 1, &[], &opts.engine)?;
        let forged = round_distribution(spec, s, k + 1, &[forge(spec)], &opts.engine)?;
        let ladder = if opts.ladder {
            Some(hybrid_ladder_from(spec, s, k, &opts.engine)?)
        } else {
            None
        };
        let out = RoundOutcome {
            k,
            distance: statistical_distance(&real, &forged),
            trace_bound: trace_bound(&honest.traces, spec, k),
            ladder,
        };
        Ok((out, real, forged))
    };

    let results = parallel_map(&ks, opts.threads.max(1), one)?;
    let weight = 1.0 / ks.len() as f64;
    let mut real_joint = Distribution::new();
    let mut forged_joint = Distribution::new();
    let mut per_round = Vec::with_capacity(results.len());
    for (r, real, forged) in results {
        if opts.keep_distributions {
            for (key, p) in real {
                real_joint.insert(format!("{}|{key}", r.k), p * weight);
            }
            for (key, p) in forged {
                forged_joint.insert(format!("{}|{key}", r.k), p * weight);
            }
        }
        per_round.push(r);
    }
    let distance = per_round.iter().map(|r| r.distance).sum::<f64>() * weight;
    let tb = per_round.iter().map(|r| r.trace_bound).sum::<f64>() * weight;
    let (per_hybrid_distances, per_hybrid_pinsker) = if opts.ladder {
        let steps = |r: &RoundOutcome| r.ladder.as_ref().map_or(0, |l| l.steps.len());
        let len = steps(&per_round[0]);
        let mean = |f: fn(&HybridStep) -> f64| -> Vec<f64> {
            (0..len)
                .map(|i| {
                    per_round
                        .iter()
                        .map(|r| f(&r.ladder.as_ref().expect("ladder requested").steps[i]))
                        .sum::<f64>()
                        * weight
                })
                .collect()
        };
        (mean(|h| h.distance), mean(|h| h.pinsker_bound))
    } else {
        (Vec::new(), Vec::new())
    };
    let t = spec.t();
    Ok(AttackOutcome {
        choice,
        horizon: cfg.horizon,
        distance,
        bound: distance_bound(t, spec.initial_entropy(), cfg.horizon),
        relaxed_bound: distance_bound(t, spec.n() as f64, cfg.horizon),
        trace_bound: tb,
        per_round,
        real_distribution: opts.keep_distributions.then_some(real_joint),
        forged_distribution: opts.keep_distributions.then_some(forged_joint),
        per_hybrid_distances,
        per_hybrid_pinsker,
        traces: honest.traces.clone(),
    })
}

/// Order-preserving map over `items` on up to `threads` scoped threads.
fn parallel_map<T, F>(items: &[usize], threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(|&k| f(k)).collect();
    }
    let mut slots: Vec<Option<Result<T>>> = (0..items.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunk = items.len().div_ceil(threads);
        let f = &f;
        for (ids, out) in items.chunks(chunk).zip(slots.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (k, slot) in ids.iter().zip(out) {
                    *slot = Some(f(*k));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("every slot filled")).collect()
}

/// The hybrids between the forged round (`Hyb_0`) and the honest one (`Hyb_t`).
///
/// `Hyb_j` decouples Alice's registers and pending message before the
/// `(j+1)`-th query of round `k+1`; `Hyb_j'` decouples Bob's registers right
/// after that query.
pub fn hybrid_ladder(spec: &ProtocolSpec, k: usize, opts: &EngineOptions) -> Result<HybridLadder> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let honest = run_snapshots(spec, k, k, opts)?;
    hybrid_ladder_from(spec, &honest.snapshots[k], k, opts)
}

/// [`hybrid_ladder`] from the state after round `k`.
pub fn hybrid_ladder_from(spec: &ProtocolSpec, s: &CqState, k: usize, opts: &EngineOptions) -> Result<HybridLadder> {
    let t = spec.t();
    let mut hybrids: Vec<(String, Vec<Intervention>)> = Vec::with_capacity(2 * t + 1);
    for j in 0..t {
        hybrids.push((
            format!("Hyb{j}"),
            vec![Intervention {
                step_in_round: j,
                phase: Phase::BeforeQuery,
                registers: spec.alice_with_query(),
            }],
        ));
        let bob = if spec.bob().is_empty() {
            vec![]
        } else {
            vec![Intervention {
                step_in_round: j,
                phase: Phase::AfterQuery,
                registers: spec.bob().to_vec(),
            }]
        };
        hybrids.push((format!("Hyb{j}'"), bob));
    }
    hybrids.push((format!("Hyb{t}"), vec![]));
    let dists = hybrids
        .iter()
        .map(|(_, iv)| round_distribution(spec, s, k + 1, iv, opts))
        .collect::<Result<Vec<_>>>()?;
    let terms = pinsker_terms(spec, s, k, opts)?;
    let steps = (0..2 * t)
        .map(|i| HybridStep {
            from: hybrids[i].0.clone(),
            to: hybrids[i + 1].0.clone(),
            distance: statistical_distance(&dists[i], &dists[i + 1]),
            expected_delta: terms[i].0,
            pinsker_bound: terms[i].1,
        })
        .collect();
    Ok(HybridLadder {
        steps,
        end_to_end: statistical_distance(&dists[0], &dists[2 * t]),
    })
}

/// Per step of round `k+1`: expected `(Δ, √(I/(2 ln 2)))` for (pending query, Bob)
/// and then for (Alice, unmeasured answer).
fn pinsker_terms(spec: &ProtocolSpec, s: &CqState, k: usize, opts: &EngineOptions) -> Result<Vec<(f64, f64)>> {
    let plain = EngineOptions { lump: false, ..*opts };
    let bob = spec.bob().to_vec();
    let alice = spec.alice().to_vec();
    let query = vec![QUERY.to_string()];
    let answer = vec![ANSWER.to_string()];
    let mut out = Vec::with_capacity(2 * spec.t());
    let mut s = s.clone();
    for j in 0..spec.t() {
        let i = k * spec.t() + j + 1;
        let mut y_term = (0.0, 0.0);
        if !bob.is_empty() {
            for b in s.branches() {
                let (d, p) = dephased_pinsker(&b.state, &query, &bob, QUERY)?;
                y_term.0 += b.weight * d;
                y_term.1 += b.weight * p;
            }
        }
        out.push(y_term);
        s = query_phase(spec, &s, i, &plain)?;
        let mut x_term = (0.0, 0.0);
        for c in s.branches() {
            let v = spec.rules().bob_update(i, &c.transcript)?;
            let applied = c.state.apply(&v)?;
            let (d, p) = dephased_pinsker(&applied, &alice, &answer, ANSWER)?;
            x_term.0 += c.weight * d;
            x_term.1 += c.weight * p;
        }
        out.push(x_term);
        s = bob_phase(spec, &s, i, &plain)?;
        s = alice_phase(spec, &s, i, &plain)?;
    }
    Ok(out)
}

fn dephased_pinsker(e: &Ensemble, x: &[String], y: &[String], classical: &str) -> Result<(f64, f64)> {
    let names: Vec<String> = x.iter().chain(y).cloned().collect();
    let rho = dephase(&e.reduced(&names)?, classical)?;
    let r = pinsker_check(&rho, x, y)?;
    Ok((r.lhs / 2.0, r.rhs / 2.0))
}

/// Fixed-`k` forgery by an Eve whose posterior comes from `prior` while the
/// parties actually run `actual` (both on the same registers).
pub fn impersonate_with_prior(
    actual: &ProtocolSpec,
    prior: &ProtocolSpec,
    k: usize,
    opts: &EngineOptions,
) -> Result<f64> {
    let plain = EngineOptions { lump: false, ..*opts };
    let real_run = run_snapshots(actual, k, k, &plain)?;
    let prior_run = run_snapshots(prior, k, k, &plain)?;
    let s = &real_run.snapshots[k];
    let believed = &prior_run.snapshots[k];
    let layout = s.layout().clone();
    let mut pos = layout.positions(&actual.alice_with_query())?;
    pos.sort_unstable();
    let mut forged = BTreeMap::new();
    for b in s.branches() {
        let key = b.transcript.key();
        let p = believed
            .branch(&key)
            .ok_or_else(|| Error::ZeroProbability(b.transcript.to_string()))?;
        let post = p.state.reduced(&actual.alice_with_query())?;
        let rest = b.state.reduced(actual.bob())?;
        forged.insert(
            key,
            Branch {
                transcript: b.transcript.clone(),
                weight: b.weight,
                state: Ensemble::product(layout.clone(), &pos, &post, &rest)?,
            },
        );
    }
    let forged = CqState::from_map(layout, forged);
    let real = round_distribution(actual, s, k + 1, &[], &plain)?;
    let fake = round_state(actual, &forged, k + 1, &[], &plain)?.classical_marginal();
    Ok(statistical_distance(&real, &fake))
}

/// `Σ_s α_s |s⟩_S ⊗ |ψ_s⟩_B`, split into its classical label and conditional states.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationInstance {
    quantum: Register,
    weights: Vec<f64>,
    states: Vec<Option<DVector<C64>>>,
}

impl ExtrapolationInstance {
    /// `generated` must hold exactly the two named registers.
    pub fn new(generated: &PureState, classical: &str, quantum: &str) -> Result<Self> {
        let layout = generated.layout();
        if layout.registers().len() != 2 {
            return Err(Error::LayoutMismatch("expected a classical and a quantum register".into()));
        }
        let c = layout.register(classical)?.clone();
        let q = layout.register(quantum)?.clone();
        let cpos = layout.position(classical).expect("checked");
        let amps = generated.amplitudes();
        let mut weights = Vec::with_capacity(c.dim());
        let mut states = Vec::with_capacity(c.dim());
        for sv in 0..c.dim() {
            let v = DVector::from_fn(q.dim(), |b, _| {
                let idx = if cpos == 0 { (sv << q.width) | b } else { (b << c.width) | sv };
                amps[idx]
            });
            let w = v.norm_squared();
            weights.push(w);
            states.push((w > tol::PRUNE).then(|| v / C64::new(w.sqrt(), 0.0)));
        }
        Ok(Self {
            quantum: q,
            weights,
            states,
        })
    }

    pub fn labels(&self) -> usize {
        self.weights.len()
    }

    /// `α_s²`.
    pub fn weight(&self, s: usize) -> f64 {
        self.weights[s]
    }

    pub fn state(&self, s: usize) -> Option<&DVector<C64>> {
        self.states[s].as_ref()
    }

    pub fn quantum_register(&self) -> &Register {
        &self.quantum
    }

    fn layout(&self) -> Result<crate::qcore::RegisterLayout> {
        crate::qcore::RegisterLayout::new(vec![self.quantum.clone()])
    }
}

/// The unbounded extrapolator: outputs `|ψ_s⟩` exactly.
pub fn brute_force_extrapolator(inst: &ExtrapolationInstance) -> impl Fn(usize) -> Result<DensityOperator> + '_ {
    move |s| {
        let layout = inst.layout()?;
        match inst.state(s) {
            Some(v) => Ok(PureState::new(layout, v.clone())?.to_density()),
            None => Ok(DensityOperator::maximally_mixed(layout)),
        }
    }
}

/// `Σ_s α_s² ⟨ψ_s| Adv(s) |ψ_s⟩`.
pub fn extrapolation_overlap(
    inst: &ExtrapolationInstance,
    extrapolator: impl Fn(usize) -> Result<DensityOperator>,
) -> Result<f64> {
    let mut total = 0.0;
    for s in 0..inst.labels() {
        let Some(psi) = inst.state(s) else { continue };
        let rho = extrapolator(s)?;
        if rho.dim() != psi.len() {
            return Err(Error::LayoutMismatch("extrapolator output has the wrong size".into()));
        }
        total += inst.weight(s) * (psi.adjoint() * rho.matrix() * psi)[(0, 0)].re;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Acceptance of the note Alice keeps and of Eve's copy after `k` verifications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloningRound {
    pub k: usize,
    pub retained: f64,
    pub forged: f64,
    pub both: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloningOutcome {
    pub choice: RoundChoice,
    pub horizon: usize,
    pub retained: f64,
    pub forged: f64,
    pub both: f64,
    /// `max(0, retained + forged − 1)`.
    pub union_bound: f64,
    pub per_round: Vec<CloningRound>,
}

/// Which oracle the verifications run against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleView {
    /// A fresh oracle held coherently by Bob.
    Sampled,
    /// The scheme's own oracle, so the note is publicly reconstructible from the transcript.
    Known,
}

/// Eve watches `k` verifications of Alice's note, then outputs her posterior
/// note; both notes are then verified against the same oracle.
pub fn cloning_adversary(
    scheme: &ToyMoneyScheme,
    cfg: &AttackConfig,
    choice: RoundChoice,
    view: OracleView,
    opts: &EngineOptions,
) -> Result<CloningOutcome> {
    let spec = match view {
        OracleView::Sampled => scheme.spec()?,
        OracleView::Known => scheme.spec_with_known_oracle()?,
    };
    let ks = ks_for(choice, cfg.horizon)?;
    let kmax = *ks.last().expect("at least one k");
    let honest = run_snapshots(&spec, kmax, kmax, opts)?;
    let m = scheme.note_qubits();
    let note = [scheme.note_register().name];
    let known_p = {
        let table = scheme.oracle().table();
        let base = crate::qcore::parse_bits(&scheme.query_input(0)).expect("bit string");
        let (th, v): (Vec<_>, Vec<_>) = (0..m).map(|i| (table[base + i] >> 1, table[base + i] & 1)).unzip();
        accept_projector(&th, &v)
    };
    let accept = |p: &nalgebra::DMatrix<C64>, rho: &DensityOperator| (p * rho.matrix()).trace().re;
    let mut per_round = Vec::with_capacity(ks.len());
    for &k in &ks {
        let mut r = CloningRound {
            k,
            retained: 0.0,
            forged: 0.0,
            both: 0.0,
        };
        for b in honest.snapshots[k].branches() {
            let copy = b.state.reduced(&note)?;
            let outcomes = match view {
                OracleView::Known => vec![(known_p.clone(), 1.0, copy.clone())],
                OracleView::Sampled => b
                    .state
                    .measure("Y")?
                    .into_iter()
                    .map(|(row, p, e)| {
                        let (th, v): (Vec<_>, Vec<_>) = (0..m).map(|i| slot(row, i, m)).map(|s| (s >> 1, s & 1)).unzip();
                        Ok((accept_projector(&th, &v), p, e.reduced(&note)?))
                    })
                    .collect::<Result<Vec<_>>>()?,
            };
            for (proj, p, kept) in outcomes {
                let a = accept(&proj, &kept);
                let f = accept(&proj, &copy);
                r.retained += b.weight * p * a;
                r.forged += b.weight * p * f;
                r.both += b.weight * p * a * f;
            }
        }
        per_round.push(r);
    }
    let w = 1.0 / per_round.len() as f64;
    let retained = per_round.iter().map(|r| r.retained).sum::<f64>() * w;
    let forged = per_round.iter().map(|r| r.forged).sum::<f64>() * w;
    let both = per_round.iter().map(|r| r.both).sum::<f64>() * w;
    Ok(CloningOutcome {
        choice,
        horizon: cfg.horizon,
        retained,
        forged,
        both,
        union_bound: (retained + forged - 1.0).max(0.0),
        per_round,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{Owner, RegisterLayout};

    #[test]
    fn budget_arithmetic() {
        assert_eq!(required_rounds(2, 1, 0.5).unwrap(), 24);
        assert!((distance_bound(1, 1.0, 100) - 0.169_864_1).abs() < 1e-6);
        let cfg = AttackConfig::from_epsilon(2, 1, 0.5).unwrap();
        assert!(cfg.implied_epsilon(2, 1) <= 0.5);
        assert!(required_rounds(1, 1, 1.5).is_err());
        assert!(AttackConfig::with_horizon(0).is_err());
    }

    fn two_label_instance() -> PureState {
        let layout = RegisterLayout::new(vec![
            Register::new("S", 1, Owner::Alice),
            Register::new("B", 1, Owner::Bob),
        ])
        .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = DVector::from_vec(vec![
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
        ]);
        PureState::new(layout, v).unwrap()
    }

    #[test]
    fn extrapolation_overlaps() {
        let inst = ExtrapolationInstance::new(&two_label_instance(), "S", "B").unwrap();
        assert!((inst.weight(0) + inst.weight(1) - 1.0).abs() < 1e-9);
        let brute = extrapolation_overlap(&inst, brute_force_extrapolator(&inst)).unwrap();
        assert!((brute - 1.0).abs() < 1e-12);
        let layout = RegisterLayout::new(vec![inst.quantum_register().clone()]).unwrap();
        let mixed = extrapolation_overlap(&inst, |_| Ok(DensityOperator::maximally_mixed(layout.clone()))).unwrap();
        assert!((mixed - 0.5).abs() < 1e-12);
        let ignore = extrapolation_overlap(&inst, |_| DensityOperator::basis(layout.clone(), 0)).unwrap();
        assert!((ignore - 0.5).abs() < 1e-12);
    }
}
