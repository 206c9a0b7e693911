use std::sync::Arc;

use super::{answer_register, bit, coherent_measure, correlated_copies, query_register};
use crate::cq::{Distribution, Transcript};
use crate::error::{Error, Result};
use crate::protocol::{round_distribution, run_snapshots, EngineOptions, ProtocolRules, ProtocolSpec};
use crate::qcore::linalg::gates;
use crate::qcore::{Isometry, Owner, PureState, Register, DEFAULT_QUBIT_CAP};

const ANSWER_WIDTH: usize = 2;

#[derive(Debug)]
struct EprRules {
    pairs: usize,
    x: Register,
    y: Register,
}

impl EprRules {
    fn pair(&self, round: usize) -> usize {
        (round - 1) % self.pairs
    }

    /// Basis challenged in `round` (1-based); round 1 always uses Z.
    fn challenge(t: &Transcript, round: usize) -> usize {
        if round == 1 {
            0
        } else {
            t.symbols()[2 * round - 3].value() & 1
        }
    }
}

impl ProtocolRules for EprRules {
    fn initial_state(&self) -> Result<PureState> {
        correlated_copies(self.x.clone(), self.y.clone(), |_| true)
    }

    fn query_width(&self) -> usize {
        1
    }

    fn answer_width(&self) -> usize {
        ANSWER_WIDTH
    }

    /// Alice reports her half of the next round's pair in the challenged basis.
    fn alice_update(&self, step: usize, transcript: &Transcript) -> Result<Isometry> {
        let round = step + 1;
        let basis = if step == 0 {
            0
        } else {
            transcript.last().map_or(0, |s| s.value() & 1)
        };
        coherent_measure(&self.x, self.pair(round), basis == 1, query_register(1))
    }

    /// Bob answers `(accept, next challenge)`. The accept bit checks Alice's
    /// report against his half; the challenge is fresh for an unused pair and
    /// repeats the pair's first basis otherwise.
    fn bob_update(&self, step: usize, transcript: &Transcript) -> Result<Isometry> {
        let j = self.pair(step);
        let basis = Self::challenge(transcript, step);
        let q = transcript.last().map_or(0, |s| s.value());
        let next = step + 1;
        let next_basis = (next > self.pairs).then(|| Self::challenge(transcript, self.pair(next) + 1));
        let n = self.pairs;
        let a = answer_register(ANSWER_WIDTH);
        let check = Isometry::classical(vec![self.y.clone()], vec![a.clone()], move |y| {
            (usize::from(bit(y, j, n) == q) << 1) | next_basis.unwrap_or(0)
        })?;
        let mut iso = check;
        if basis == 1 {
            let h = Isometry::unitary(vec![self.y.clone()], gates::on_qubit(&gates::hadamard(), j, n))?;
            iso = h.then(&iso)?.then(&h)?;
        }
        if next_basis.is_none() {
            let coin = Isometry::unitary(vec![a], gates::on_qubit(&gates::hadamard(), 1, ANSWER_WIDTH))?;
            iso = iso.then(&coin)?;
        }
        Ok(iso)
    }

    fn memory(&self, step: usize, transcript: &Transcript) -> String {
        let mut m: String = (1..=step.min(self.pairs))
            .map(|r| if Self::challenge(transcript, r) == 1 { '1' } else { '0' })
            .collect();
        m.push('|');
        if step > 0 {
            m.push(if Self::challenge(transcript, step + 1) == 1 { '1' } else { '0' });
        }
        m
    }
}

/// Entanglement-based authentication.
///
/// Alice and Bob share Bell pairs, used round-robin. Each round Alice reports
/// her half of the round's pair in the basis Bob challenged; Bob answers with
/// his accept bit and the challenge for the next round.
#[derive(Debug, Clone)]
pub struct AuthScheme {
    pub spec: ProtocolSpec,
    pub pairs: usize,
    pub rounds: usize,
    /// Minimum over rounds `1..=rounds` of the honest acceptance probability.
    pub completeness: f64,
}

impl AuthScheme {
    /// Whether a full key ends in an accepting answer.
    pub fn accepted(key: &str) -> bool {
        key.len() >= ANSWER_WIDTH && key.as_bytes()[key.len() - ANSWER_WIDTH] == b'1'
    }

    /// Probability that the last answer in a round distribution is an accept.
    pub fn acceptance(dist: &Distribution) -> f64 {
        dist.iter().filter(|(k, _)| Self::accepted(k)).map(|(_, p)| p).sum()
    }
}

/// Builds the scheme and measures its completeness over `rounds` honest rounds.
pub fn epr_auth(pairs: usize, rounds: usize) -> Result<AuthScheme> {
    if pairs == 0 || rounds == 0 {
        return Err(Error::InvalidConfig("need at least one pair and one round".into()));
    }
    let rules = EprRules {
        pairs,
        x: Register::new("X", pairs, Owner::Alice),
        y: Register::new("Y", pairs, Owner::Bob),
    };
    let spec = ProtocolSpec::new(
        "epr-auth",
        format!("epr-auth pairs={pairs}"),
        1,
        usize::MAX,
        DEFAULT_QUBIT_CAP,
        Arc::new(rules),
    )?;
    let opts = EngineOptions::default();
    let honest = run_snapshots(&spec, rounds - 1, rounds - 1, &opts)?;
    let mut completeness: f64 = 1.0;
    for (r, s) in honest.snapshots.iter().enumerate() {
        let d = round_distribution(&spec, s, r + 1, &[], &opts)?;
        completeness = completeness.min(AuthScheme::acceptance(&d));
    }
    Ok(AuthScheme {
        spec,
        pairs,
        rounds,
        completeness,
    })
}
