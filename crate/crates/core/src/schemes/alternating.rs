use std::sync::Arc;

use super::{answer_register, coherent_measure, constant, correlated_copies, query_register};
use crate::cq::Transcript;
use crate::error::{Error, Result};
use crate::protocol::{ProtocolRules, ProtocolSpec};
use crate::qcore::{Isometry, Owner, PureState, Register, DEFAULT_QUBIT_CAP};

#[derive(Debug)]
struct AlternatingRules {
    x: Register,
    y: Register,
}

impl ProtocolRules for AlternatingRules {
    fn initial_state(&self) -> Result<PureState> {
        correlated_copies(self.x.clone(), self.y.clone(), |_| true)
    }

    fn query_width(&self) -> usize {
        1
    }

    fn answer_width(&self) -> usize {
        1
    }

    /// Message `j` reads qubit `j mod n`, in Z on even sweeps and X on odd ones.
    fn alice_update(&self, step: usize, _transcript: &Transcript) -> Result<Isometry> {
        let n = self.x.width;
        coherent_measure(&self.x, step % n, (step / n) % 2 == 1, query_register(1))
    }

    fn bob_update(&self, _step: usize, _transcript: &Transcript) -> Result<Isometry> {
        constant(vec![self.y.clone()], answer_register(1), 0)
    }

    fn memory(&self, _step: usize, _transcript: &Transcript) -> String {
        String::new()
    }
}

/// `n` Bell pairs; Alice announces her halves one qubit per message,
/// sweeping them alternately in the Z and X bases. Bob always answers 0.
pub fn alternating_basis(n: usize) -> Result<ProtocolSpec> {
    if n == 0 {
        return Err(Error::InvalidConfig("need at least one pair".into()));
    }
    let rules = AlternatingRules {
        x: Register::new("X", n, Owner::Alice),
        y: Register::new("Y", n, Owner::Bob),
    };
    ProtocolSpec::new(
        "alternating",
        format!("alternating basis n={n}"),
        1,
        usize::MAX,
        DEFAULT_QUBIT_CAP,
        Arc::new(rules),
    )
}
