use std::sync::Arc;

use super::{answer_register, correlated_copies, query_register};
use crate::cq::Transcript;
use crate::error::{Error, Result};
use crate::protocol::{ProtocolRules, ProtocolSpec};
use crate::qcore::{Isometry, Owner, PureState, Register, DEFAULT_QUBIT_CAP};

/// How an `n`-bit key encodes trigger rounds for horizon `K`.
///
/// The key splits into `⌊n/b⌋` chunks of `b = ⌈log₂K⌉` bits (most significant
/// first); chunk value `v` names trigger round `v + 1`. Before any trigger
/// Alice sends 0, and each trigger that has passed flips her message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriggerKey {
    pub n: usize,
    pub horizon: usize,
    pub chunk_width: usize,
    pub triggers: usize,
}

impl TriggerKey {
    pub fn new(n: usize, horizon: usize) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::InvalidConfig("horizon must be at least 2".into()));
        }
        let chunk_width = horizon.next_power_of_two().trailing_zeros() as usize;
        let triggers = n / chunk_width;
        if triggers == 0 {
            return Err(Error::InvalidConfig(format!(
                "{n} key bits cannot hold a trigger for horizon {horizon}"
            )));
        }
        Ok(Self {
            n,
            horizon,
            chunk_width,
            triggers,
        })
    }

    pub fn trigger_rounds(&self, key: usize) -> Vec<usize> {
        let mask = (1 << self.chunk_width) - 1;
        (0..self.triggers)
            .map(|c| ((key >> (self.n - (c + 1) * self.chunk_width)) & mask) + 1)
            .collect()
    }

    /// Alice's message in `round`: parity of the triggers at or before it.
    pub fn message(&self, key: usize, round: usize) -> usize {
        self.trigger_rounds(key).iter().filter(|&&r| r <= round).count() % 2
    }
}

#[derive(Debug)]
struct TriggerRules {
    key: TriggerKey,
    first: Option<usize>,
    x: Register,
    y: Register,
}

impl ProtocolRules for TriggerRules {
    fn initial_state(&self) -> Result<PureState> {
        let key = self.key;
        let first = self.first;
        correlated_copies(self.x.clone(), self.y.clone(), move |k| {
            first.is_none_or(|r| key.trigger_rounds(k)[0] == r)
        })
    }

    fn query_width(&self) -> usize {
        1
    }

    fn answer_width(&self) -> usize {
        1
    }

    fn alice_update(&self, step: usize, _transcript: &Transcript) -> Result<Isometry> {
        let key = self.key;
        Isometry::classical(vec![self.x.clone()], vec![query_register(1)], move |k| key.message(k, step + 1))
    }

    /// Bob accepts iff the message matches what his copy of the key predicts.
    fn bob_update(&self, step: usize, transcript: &Transcript) -> Result<Isometry> {
        let key = self.key;
        let q = transcript.last().map_or(0, |s| s.value());
        Isometry::classical(vec![self.y.clone()], vec![answer_register(1)], move |k| {
            usize::from(key.message(k, step) == q)
        })
    }

    fn memory(&self, _step: usize, _transcript: &Transcript) -> String {
        String::new()
    }
}

fn build(n: usize, horizon: usize, first: Option<usize>) -> Result<ProtocolSpec> {
    let key = TriggerKey::new(n, horizon)?;
    if let Some(r) = first {
        if r == 0 || r > 1 << key.chunk_width {
            return Err(Error::InvalidConfig(format!("trigger round {r} is not encodable")));
        }
    }
    let rules = TriggerRules {
        key,
        first,
        x: Register::new("X", n, Owner::Alice),
        y: Register::new("Y", n, Owner::Bob),
    };
    let description = match first {
        None => format!("trigger n={n} K={horizon}"),
        Some(r) => format!("trigger n={n} K={horizon} first={r}"),
    };
    ProtocolSpec::new("trigger", description, 1, usize::MAX, DEFAULT_QUBIT_CAP, Arc::new(rules))
}

/// Classical protocol whose uniformly random key schedules trigger rounds.
/// Bob holds a copy of the key.
pub fn trigger_protocol(n: usize, horizon: usize) -> Result<ProtocolSpec> {
    build(n, horizon, None)
}

/// As [`trigger_protocol`], with the first trigger pinned to `round`.
pub fn trigger_protocol_with_first_trigger(n: usize, horizon: usize, round: usize) -> Result<ProtocolSpec> {
    build(n, horizon, Some(round))
}
