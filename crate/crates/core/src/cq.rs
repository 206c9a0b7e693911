//! Classical-quantum ensembles: quantum branches keyed by classical transcripts.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{parse_bits, DensityOperator, Ensemble, Owner, Register, RegisterLayout};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub direction: Direction,
    pub bits: String,
}

impl Symbol {
    pub fn query(bits: impl Into<String>) -> Self {
        Self {
            direction: Direction::AliceToBob,
            bits: bits.into(),
        }
    }

    pub fn answer(bits: impl Into<String>) -> Self {
        Self {
            direction: Direction::BobToAlice,
            bits: bits.into(),
        }
    }

    pub fn value(&self) -> usize {
        parse_bits(&self.bits).expect("symbols hold bit strings")
    }
}

/// Ordered list of exchanged messages.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transcript {
    symbols: Vec<Symbol>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        Self { symbols }
    }

    /// Alternating query/answer transcript from bit strings.
    pub fn alternating<S: AsRef<str>>(values: &[S]) -> Self {
        let symbols = values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if i % 2 == 0 {
                    Symbol::query(v.as_ref())
                } else {
                    Symbol::answer(v.as_ref())
                }
            })
            .collect();
        Self { symbols }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn push(&mut self, symbol: Symbol) {
        self.symbols.push(symbol);
    }

    pub fn with(&self, symbol: Symbol) -> Self {
        let mut t = self.clone();
        t.push(symbol);
        t
    }

    pub fn last(&self) -> Option<&Symbol> {
        self.symbols.last()
    }

    /// The last `n` symbols (fewer if the transcript is shorter).
    pub fn tail(&self, n: usize) -> &[Symbol] {
        &self.symbols[self.symbols.len().saturating_sub(n)..]
    }

    /// Flat key: the concatenated bit strings.
    pub fn key(&self) -> String {
        self.symbols.iter().map(|s| s.bits.as_str()).collect()
    }

    pub fn widths(&self) -> Vec<usize> {
        self.symbols.iter().map(|s| s.bits.len()).collect()
    }

    pub fn is_prefix_of(&self, other: &Transcript) -> bool {
        self.len() <= other.len() && self.symbols[..] == other.symbols[..self.len()]
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.symbols.iter().map(|s| s.bits.as_str()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// One classical outcome with its probability and normalized quantum state.
#[derive(Debug, Clone)]
pub struct Branch {
    pub transcript: Transcript,
    pub weight: f64,
    pub state: Ensemble,
}

impl Branch {
    /// The subnormalized operator `weight · state`.
    pub fn operator(&self) -> DensityOperator {
        self.state.density().scaled(self.weight)
    }
}

/// Probability distribution over string keys.
pub type Distribution = BTreeMap<String, f64>;

/// Classical-quantum state: branches keyed by their flat transcript key.
#[derive(Debug, Clone)]
pub struct CqState {
    layout: RegisterLayout,
    branches: BTreeMap<String, Branch>,
}

impl CqState {
    /// Builds a state from subnormalized branch operators; weights are their traces.
    pub fn from_operators(layout: RegisterLayout, branches: Vec<(Transcript, DensityOperator)>) -> Result<Self> {
        let mut out = Vec::with_capacity(branches.len());
        for (t, rho) in branches {
            let weight = rho.trace();
            if weight < tol::PRUNE {
                continue;
            }
            out.push(Branch {
                transcript: t,
                weight,
                state: Ensemble::from_density(&rho)?,
            });
        }
        Self::from_branches(layout, out)
    }

    /// Validates layouts, key arity and total weight.
    pub fn from_branches(layout: RegisterLayout, branches: Vec<Branch>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut schema: Option<Vec<usize>> = None;
        let mut total = 0.0;
        for b in branches {
            if b.state.layout() != &layout {
                return Err(Error::LayoutMismatch(format!("branch `{}` has a different layout", b.transcript)));
            }
            let widths = b.transcript.widths();
            match &schema {
                Some(s) if *s != widths => {
                    return Err(Error::InvalidState(format!("branch `{}` breaks the key schema", b.transcript)))
                }
                None => schema = Some(widths),
                _ => {}
            }
            total += b.weight;
            let key = b.transcript.key();
            if map.insert(key.clone(), b).is_some() {
                return Err(Error::InvalidState(format!("duplicate branch key `{key}`")));
            }
        }
        if (total - 1.0).abs() > tol::CQ_WEIGHT {
            return Err(Error::InvalidDistribution(format!("branch weights sum to {total}")));
        }
        Ok(Self { layout, branches: map })
    }

    pub(crate) fn from_map(layout: RegisterLayout, branches: BTreeMap<String, Branch>) -> Self {
        Self { layout, branches }
    }

    pub fn single(state: Ensemble) -> Self {
        let layout = state.layout().clone();
        let mut branches = BTreeMap::new();
        branches.insert(
            String::new(),
            Branch {
                transcript: Transcript::new(),
                weight: 1.0,
                state,
            },
        );
        Self { layout, branches }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Branches in key order.
    pub fn branches(&self) -> impl Iterator<Item = &Branch> {
        self.branches.values()
    }

    pub fn branch(&self, key: &str) -> Option<&Branch> {
        self.branches.get(key)
    }

    pub fn into_branches(self) -> impl Iterator<Item = Branch> {
        self.branches.into_values()
    }

    /// Symbol widths shared by every key.
    pub fn schema(&self) -> Vec<usize> {
        self.branches.values().next().map(|b| b.transcript.widths()).unwrap_or_default()
    }

    pub fn total_weight(&self) -> f64 {
        self.branches.values().map(|b| b.weight).sum()
    }

    /// Restriction to branches extending `prefix`, renormalized.
    pub fn condition(&self, prefix: &Transcript) -> Result<Self> {
        let kept: Vec<&Branch> = self
            .branches
            .values()
            .filter(|b| prefix.is_prefix_of(&b.transcript))
            .collect();
        let total: f64 = kept.iter().map(|b| b.weight).sum();
        if total < tol::PRUNE {
            return Err(Error::ZeroProbability(prefix.to_string()));
        }
        let branches = kept
            .into_iter()
            .map(|b| {
                let mut b = b.clone();
                b.weight /= total;
                (b.transcript.key(), b)
            })
            .collect();
        Ok(Self::from_map(self.layout.clone(), branches))
    }

    pub fn classical_marginal(&self) -> Distribution {
        self.branches.iter().map(|(k, b)| (k.clone(), b.weight)).collect()
    }

    /// Branchwise partial trace onto `keep`.
    pub fn quantum_marginal<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let layout = self.layout.sublayout(keep)?;
        let mut branches = BTreeMap::new();
        for (k, b) in &self.branches {
            let state = Ensemble::from_density(&b.state.reduced(keep)?)?;
            branches.insert(
                k.clone(),
                Branch {
                    transcript: b.transcript.clone(),
                    weight: b.weight,
                    state,
                },
            );
        }
        Ok(Self::from_map(layout, branches))
    }

    /// Decouples `registers` from the rest inside every branch.
    pub fn replace_subsystem<S: AsRef<str>>(&self, registers: &[S]) -> Result<Self> {
        let mut branches = BTreeMap::new();
        for (k, b) in &self.branches {
            branches.insert(
                k.clone(),
                Branch {
                    transcript: b.transcript.clone(),
                    weight: b.weight,
                    state: b.state.decouple(registers)?,
                },
            );
        }
        Ok(Self::from_map(self.layout.clone(), branches))
    }

    /// Weighted sum of branch operators with no classical register.
    pub fn average(&self) -> DensityOperator {
        let d = self.layout.dim();
        let mut m = DMatrix::zeros(d, d);
        for b in self.branches.values() {
            m += b.operator().matrix();
        }
        DensityOperator::new(self.layout.clone(), m).expect("weighted sum of valid branches")
    }

    /// `Σ weight ρ` without requiring unit total weight.
    pub(crate) fn average_unnormalized(&self) -> DensityOperator {
        let d = self.layout.dim();
        let mut m = DMatrix::zeros(d, d);
        for b in self.branches.values() {
            m += b.operator().matrix();
        }
        DensityOperator::from_parts(self.layout.clone(), m)
    }

    /// `Σ_τ |τ⟩⟨τ|_T ⊗ weight_τ ρ_τ`, with the classical register `T` first.
    pub fn dephase_average(&self) -> Result<DensityOperator> {
        let width = self.schema().iter().sum::<usize>();
        if width == 0 {
            return Ok(self.average());
        }
        let t = Register::new("T", width, Owner::Environment);
        let layout = RegisterLayout::with_cap(vec![t], self.layout.cap())?.concat(&self.layout)?;
        let dq = self.layout.dim();
        let mut m = DMatrix::<C64>::zeros(layout.dim(), layout.dim());
        for (k, b) in &self.branches {
            let tau = parse_bits(k).expect("keys are bit strings");
            let block = b.operator();
            m.view_mut((tau * dq, tau * dq), (dq, dq)).copy_from(block.matrix());
        }
        DensityOperator::new(layout, m)
    }
}
