use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{answer_register, constant, query_register};
use crate::cq::Transcript;
use crate::error::{Error, Result};
use crate::oraclesim::{classical_query, sample_random_oracle, OracleInstance, Party, QueryLog};
use crate::protocol::{ProtocolRules, ProtocolSpec};
use crate::qcore::{bits, parse_bits, DensityOperator, Isometry, Owner, PureState, Register, RegisterLayout, DEFAULT_QUBIT_CAP};
use crate::tol;

/// Largest supported note.
pub const MAX_NOTE_QUBITS: usize = 4;
const PK_WIDTH: usize = 2;
const SLOT_WIDTH: usize = 2;

/// How the verifier may reach the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QueryModel {
    Classical,
    Quantum,
}

/// `⊗ᵢ H^{θᵢ}|vᵢ⟩`, qubit 0 most significant.
pub fn note_amplitudes(thetas: &[usize], values: &[usize]) -> DVector<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = DVector::from_element(1, C64::new(1.0, 0.0));
    for (&th, &val) in thetas.iter().zip(values) {
        let q = match (th, val) {
            (0, 0) => [1.0, 0.0],
            (0, _) => [0.0, 1.0],
            (_, 0) => [s, s],
            _ => [s, -s],
        };
        let q = DVector::from_vec(q.iter().map(|&a| C64::new(a, 0.0)).collect());
        v = v.kronecker(&q);
    }
    v
}

/// Projector accepted by the verifier: every qubit in its recorded basis state.
pub fn accept_projector(thetas: &[usize], values: &[usize]) -> DMatrix<C64> {
    let v = note_amplitudes(thetas, values);
    &v * v.adjoint()
}

/// Slot `i` of a packed oracle row `(θ₀v₀)(θ₁v₁)…`.
pub(crate) fn slot(row: usize, i: usize, m: usize) -> usize {
    (row >> (SLOT_WIDTH * (m - 1 - i))) & 3
}

/// A BB84-style mini money scheme whose bases and values sit behind a random oracle.
#[derive(Debug, Clone)]
pub struct ToyMoneyScheme {
    note_qubits: usize,
    index_width: usize,
    pk: usize,
    oracle: OracleInstance,
}

impl ToyMoneyScheme {
    pub fn new(note_qubits: usize, seed: u64) -> Result<Self> {
        Self::with_query_model(note_qubits, seed, QueryModel::Classical)
    }

    pub fn with_query_model(note_qubits: usize, seed: u64, model: QueryModel) -> Result<Self> {
        if model == QueryModel::Quantum {
            return Err(Error::QuantumQueries);
        }
        if note_qubits == 0 || note_qubits > MAX_NOTE_QUBITS {
            return Err(Error::InvalidConfig(format!(
                "notes hold 1 to {MAX_NOTE_QUBITS} qubits"
            )));
        }
        let index_width = note_qubits.next_power_of_two().trailing_zeros().max(1) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pk = rng.random_range(0..1 << PK_WIDTH);
        let oracle = sample_random_oracle(PK_WIDTH + index_width, SLOT_WIDTH, rng.random())?;
        Ok(Self {
            note_qubits,
            index_width,
            pk,
            oracle,
        })
    }

    pub fn note_qubits(&self) -> usize {
        self.note_qubits
    }

    pub fn pk(&self) -> String {
        bits(self.pk, PK_WIDTH)
    }

    pub fn oracle(&self) -> &OracleInstance {
        &self.oracle
    }

    /// Messages per verification: one oracle query per qubit, then the verdict.
    pub fn t(&self) -> usize {
        self.note_qubits + 1
    }

    /// Oracle input `pk‖i`.
    pub fn query_input(&self, i: usize) -> String {
        bits((self.pk << self.index_width) | i, PK_WIDTH + self.index_width)
    }

    /// Bases and values under `pk`, read through the logged query interface.
    fn slots(&self, log: &mut QueryLog, party: Party) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut thetas = Vec::with_capacity(self.note_qubits);
        let mut values = Vec::with_capacity(self.note_qubits);
        for i in 0..self.note_qubits {
            let y = classical_query(&self.oracle, log, party, &self.query_input(i))?;
            let y = parse_bits(&y).expect("oracle outputs are bit strings");
            thetas.push(y >> 1);
            values.push(y & 1);
        }
        Ok((thetas, values))
    }

    pub fn note_register(&self) -> Register {
        Register::new("X", self.note_qubits, Owner::Alice)
    }

    pub fn mint(&self, log: &mut QueryLog) -> Result<PureState> {
        let (thetas, values) = self.slots(log, Party::Mint)?;
        let layout = RegisterLayout::new(vec![self.note_register()])?;
        PureState::new(layout, note_amplitudes(&thetas, &values))
    }

    /// Verifies `note` with classical oracle queries. Returns the acceptance
    /// probability and the post-measurement note given acceptance (the input
    /// note when acceptance is impossible).
    pub fn verify(&self, note: &DensityOperator, log: &mut QueryLog) -> Result<(f64, DensityOperator)> {
        if note.dim() != 1 << self.note_qubits {
            return Err(Error::LayoutMismatch("note has the wrong size".into()));
        }
        let (thetas, values) = self.slots(log, Party::Verifier)?;
        let p = accept_projector(&thetas, &values);
        let rho = note.normalized()?;
        let kept = &p * rho.matrix() * &p;
        let acc = kept.trace().re;
        if acc < tol::PRUNE {
            return Ok((0.0, rho));
        }
        let post = DensityOperator::new(rho.layout().clone(), kept / C64::new(acc, 0.0))?;
        Ok((acc, post))
    }

    /// Probability that `times` successive verifications all accept.
    pub fn verify_repeatedly(&self, note: &DensityOperator, times: usize, log: &mut QueryLog) -> Result<f64> {
        let mut rho = note.clone();
        let mut all = 1.0;
        for _ in 0..times {
            let (p, post) = self.verify(&rho, log)?;
            all *= p;
            if p == 0.0 {
                break;
            }
            rho = post;
        }
        Ok(all)
    }

    /// The verification protocol with Bob playing a freshly sampled oracle,
    /// held coherently in `Y` and entangled with the note.
    pub fn spec(&self) -> Result<ProtocolSpec> {
        self.build(false)
    }

    /// The verification protocol against this scheme's fixed oracle; the note is pure.
    pub fn spec_with_known_oracle(&self) -> Result<ProtocolSpec> {
        self.build(true)
    }

    fn build(&self, known: bool) -> Result<ProtocolSpec> {
        let m = self.note_qubits;
        let table = known.then(|| {
            (0..m)
                .map(|i| self.oracle.table()[(self.pk << self.index_width) | i])
                .collect::<Vec<_>>()
        });
        let rules = MoneyRules {
            m,
            index_width: self.index_width,
            pk: self.pk,
            known: table,
            x: self.note_register(),
            y: Register::new("Y", SLOT_WIDTH * m, Owner::Bob),
        };
        let name = if known { "toy-money-known" } else { "toy-money" };
        ProtocolSpec::new(
            name,
            format!("{name} m={m} pk={}", self.pk()),
            self.t(),
            usize::MAX,
            DEFAULT_QUBIT_CAP,
            Arc::new(rules),
        )
    }
}

#[derive(Debug)]
struct MoneyRules {
    m: usize,
    index_width: usize,
    pk: usize,
    known: Option<Vec<usize>>,
    x: Register,
    y: Register,
}

impl MoneyRules {
    fn t(&self) -> usize {
        self.m + 1
    }

    fn qw(&self) -> usize {
        PK_WIDTH + self.index_width
    }

    fn bob_inputs(&self) -> Vec<Register> {
        if self.known.is_some() {
            vec![]
        } else {
            vec![self.y.clone()]
        }
    }

    fn split(slot: usize) -> (usize, usize) {
        (slot >> 1, slot & 1)
    }
}

impl ProtocolRules for MoneyRules {
    fn initial_state(&self) -> Result<PureState> {
        let m = self.m;
        if let Some(slots) = &self.known {
            let (th, v): (Vec<_>, Vec<_>) = slots.iter().map(|&s| Self::split(s)).unzip();
            let layout = RegisterLayout::with_cap(vec![self.x.clone()], usize::MAX)?;
            return PureState::new(layout, note_amplitudes(&th, &v));
        }
        let layout = RegisterLayout::with_cap(vec![self.x.clone(), self.y.clone()], usize::MAX)?;
        let yw = SLOT_WIDTH * m;
        let mut amps = DVector::<C64>::zeros(layout.dim());
        for row in 0..1usize << yw {
            let (th, v): (Vec<_>, Vec<_>) = (0..m).map(|i| Self::split(slot(row, i, m))).unzip();
            let note = note_amplitudes(&th, &v);
            for (x, a) in note.iter().enumerate() {
                amps[(x << yw) | row] = *a;
            }
        }
        PureState::normalized(layout, amps)
    }

    fn query_width(&self) -> usize {
        self.qw()
    }

    fn answer_width(&self) -> usize {
        SLOT_WIDTH
    }

    /// Queries `pk‖j` for each qubit, then announces the verdict of projecting
    /// the note onto the answered bases and values.
    fn alice_update(&self, step: usize, transcript: &Transcript) -> Result<Isometry> {
        let j = step % self.t();
        let q = query_register(self.qw());
        if j < self.m {
            let input = (self.pk << self.index_width) | j;
            return constant(vec![self.x.clone()], q, input);
        }
        let answers: Vec<usize> = transcript
            .tail(2 * self.m)
            .iter()
            .skip(1)
            .step_by(2)
            .map(|s| s.value())
            .collect();
        let (th, v): (Vec<_>, Vec<_>) = answers.iter().map(|&s| Self::split(s)).unzip();
        let p = accept_projector(&th, &v);
        let d = p.nrows();
        let qd = 1 << self.qw();
        let mut w = DMatrix::zeros(d * qd, d);
        for r in 0..d {
            for c in 0..d {
                let pass = p[(r, c)];
                let fail = if r == c { C64::new(1.0, 0.0) - pass } else { -pass };
                w[(r * qd + 1, c)] = pass;
                w[(r * qd, c)] = fail;
            }
        }
        Isometry::new(vec![self.x.clone()], vec![self.x.clone(), q], w)
    }

    fn bob_update(&self, step: usize, transcript: &Transcript) -> Result<Isometry> {
        let p = (step - 1) % self.t();
        let a = answer_register(SLOT_WIDTH);
        if p == self.m {
            return constant(self.bob_inputs(), a, 0);
        }
        let q = transcript.last().map_or(0, |s| s.value());
        let i = q & ((1 << self.index_width) - 1);
        if q >> self.index_width != self.pk || i >= self.m {
            return constant(self.bob_inputs(), a, 0);
        }
        match &self.known {
            Some(slots) => constant(vec![], a, slots[i]),
            None => {
                let m = self.m;
                Isometry::classical(vec![self.y.clone()], vec![a], move |row| slot(row, i, m))
            }
        }
    }

    fn memory(&self, step: usize, transcript: &Transcript) -> String {
        let n = 2 * (step % self.t());
        Transcript::from_symbols(transcript.tail(n).to_vec()).key()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honest_note_survives_repeated_verification() {
        for m in 1..=MAX_NOTE_QUBITS {
            let s = ToyMoneyScheme::new(m, 11).unwrap();
            let mut log = QueryLog::new();
            let note = s.mint(&mut log).unwrap().to_density();
            let p = s.verify_repeatedly(&note, 25, &mut log).unwrap();
            assert!((p - 1.0).abs() < 1e-12);
            assert!(log.entries().iter().all(|e| e.input.len() == s.oracle().input_width()));
        }
    }

    #[test]
    fn mixed_note_accepts_with_chance_one_over_two_to_the_m() {
        for m in 1..=3 {
            let s = ToyMoneyScheme::new(m, 3).unwrap();
            let layout = RegisterLayout::new(vec![s.note_register()]).unwrap();
            let (p, _) = s
                .verify(&DensityOperator::maximally_mixed(layout), &mut QueryLog::new())
                .unwrap();
            assert!((p - 0.5f64.powi(m as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn quantum_queries_are_refused() {
        assert!(matches!(
            ToyMoneyScheme::with_query_model(2, 0, QueryModel::Quantum),
            Err(Error::QuantumQueries)
        ));
        assert!(ToyMoneyScheme::new(5, 0).is_err());
    }
}
