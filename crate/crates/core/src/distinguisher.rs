//! Appends a closing exchange to every round in which one party measures its
//! private registers and announces the outcome.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::cq::Transcript;
use crate::error::{Error, Result};
use crate::protocol::{ProtocolRules, ProtocolSpec, ANSWER, QUERY};
use crate::qcore::{Isometry, Owner, PureState, Register};

/// A two-outcome projective measurement on one party's registers: rotate by
/// `basis`, then report `accept` of the computational-basis index.
#[derive(Clone)]
pub struct Distinguisher {
    pub party: Owner,
    pub basis: DMatrix<C64>,
    pub accept: Arc<dyn Fn(usize) -> bool + Send + Sync>,
}

impl fmt::Debug for Distinguisher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Distinguisher")
            .field("party", &self.party)
            .field("dim", &self.basis.nrows())
            .finish_non_exhaustive()
    }
}

impl Distinguisher {
    /// Reports whether the party's registers read `target` in the computational basis.
    pub fn computational(party: Owner, width: usize, target: usize) -> Self {
        Self {
            party,
            basis: DMatrix::identity(1 << width, 1 << width),
            accept: Arc::new(move |x| x == target),
        }
    }

    fn isometry(&self, registers: &[Register], out: Register) -> Result<Isometry> {
        let accept = self.accept.clone();
        let read = Isometry::classical(registers.to_vec(), vec![out], move |x| usize::from(accept(x)))?;
        let u = Isometry::unitary(registers.to_vec(), self.basis.clone())?;
        let back = Isometry::unitary(registers.to_vec(), self.basis.adjoint())?;
        u.then(&read)?.then(&back)
    }
}

#[derive(Debug)]
struct ClosingRules {
    inner: Arc<dyn ProtocolRules>,
    t: usize,
    alice: Vec<Register>,
    bob: Vec<Register>,
    check: Distinguisher,
}

impl ClosingRules {
    /// Position of outer step `s` inside its round, `1..=t+1`.
    fn position(&self, s: usize) -> usize {
        (s - 1) % (self.t + 1) + 1
    }

    /// Inner steps completed by the end of outer step `s`.
    fn inner_steps(&self, s: usize) -> usize {
        if s == 0 {
            return 0;
        }
        (s - 1) / (self.t + 1) * self.t + self.position(s).min(self.t)
    }

    /// The transcript with the closing exchanges removed.
    fn inner_transcript(&self, t: &Transcript) -> Transcript {
        let kept = t
            .symbols()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.position(i / 2 + 1) <= self.t)
            .map(|(_, s)| s.clone())
            .collect();
        Transcript::from_symbols(kept)
    }

    fn silent(&self, registers: &[Register], out: Register) -> Result<Isometry> {
        Isometry::classical(registers.to_vec(), vec![out], |_| 0)
    }
}

impl ProtocolRules for ClosingRules {
    fn initial_state(&self) -> Result<PureState> {
        self.inner.initial_state()
    }

    fn query_width(&self) -> usize {
        self.inner.query_width()
    }

    fn answer_width(&self) -> usize {
        self.inner.answer_width()
    }

    fn alice_update(&self, step: usize, transcript: &Transcript) -> Result<Isometry> {
        let q = Register::new(QUERY, self.query_width(), Owner::Message);
        if self.position(step + 1) <= self.t {
            return self.inner.alice_update(self.inner_steps(step + 1) - 1, &self.inner_transcript(transcript));
        }
        match self.check.party {
            Owner::Alice => self.check.isometry(&self.alice, q),
            _ => self.silent(&self.alice, q),
        }
    }

    fn bob_update(&self, step: usize, transcript: &Transcript) -> Result<Isometry> {
        let a = Register::new(ANSWER, self.answer_width(), Owner::Message);
        if self.position(step) <= self.t {
            return self.inner.bob_update(self.inner_steps(step), &self.inner_transcript(transcript));
        }
        match self.check.party {
            Owner::Bob => self.check.isometry(&self.bob, a),
            _ => self.silent(&self.bob, a),
        }
    }

    fn memory(&self, step: usize, transcript: &Transcript) -> String {
        let inner = self.inner.memory(self.inner_steps(step), &self.inner_transcript(transcript));
        let pos = if step == 0 { 0 } else { self.position(step) };
        format!("{pos}:{inner}")
    }
}

/// The protocol with one extra exchange per round, in which `check.party`
/// sends the outcome of `check` and the other party sends zeros.
pub fn with_distinguisher_round(spec: &ProtocolSpec, check: Distinguisher) -> Result<ProtocolSpec> {
    let alice = spec.alice_registers();
    let bob = spec.bob_registers();
    let owned = match check.party {
        Owner::Alice => &alice,
        Owner::Bob => &bob,
        _ => return Err(Error::InvalidConfig("the distinguisher must belong to Alice or Bob".into())),
    };
    let width: usize = owned.iter().map(|r| r.width).sum();
    if owned.is_empty() || check.basis.shape() != (1 << width, 1 << width) {
        return Err(Error::InvalidConfig(format!(
            "distinguisher basis must act on the party's {width} qubits"
        )));
    }
    let rules = ClosingRules {
        inner: spec.shared_rules(),
        t: spec.t(),
        alice,
        bob,
        check,
    };
    ProtocolSpec::new(
        format!("{}+check", spec.name()),
        format!("{} with closing check", spec.description()),
        spec.t() + 1,
        spec.max_rounds(),
        spec.qubit_cap(),
        Arc::new(rules),
    )
}
