use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{answer_register, query_register};
use crate::cq::Transcript;
use crate::error::{Error, Result};
use crate::protocol::{ProtocolRules, ProtocolSpec};
use crate::qcore::linalg::{gates, haar_unitary, kron};
use crate::qcore::{Isometry, Owner, PureState, Register, RegisterLayout, DEFAULT_QUBIT_CAP};

/// Distribution of the per-step unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Haar,
    Clifford,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" => Ok(Self::Haar),
            "clifford" => Ok(Self::Clifford),
            other => Err(Error::InvalidConfig(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomProtocolConfig {
    pub family: Family,
    pub x_width: usize,
    pub y_width: usize,
    pub t: usize,
    pub seed: u64,
}

#[derive(Debug)]
struct RandomRules {
    cfg: RandomProtocolConfig,
    x: Register,
    y: Register,
}

const ALICE: u64 = 1;
const BOB: u64 = 2;
const INIT: u64 = 3;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0, |h, &p| splitmix(h ^ p))
}

/// Random circuit of H, S and CNOT layers on `w` qubits.
fn random_clifford<R: Rng>(w: usize, rng: &mut R) -> DMatrix<C64> {
    let d = 1 << w;
    let mut u = DMatrix::identity(d, d);
    let h = gates::hadamard();
    let s = gates::phase_s();
    for _ in 0..2 * w + 2 {
        for q in 0..w {
            match rng.random_range(0..4) {
                0 => u = gates::on_qubit(&h, q, w) * u,
                1 => u = gates::on_qubit(&s, q, w) * u,
                2 => u = gates::on_qubit(&(&h * &s), q, w) * u,
                _ => {}
            }
        }
        if w > 1 {
            let c = rng.random_range(0..w);
            let t = (c + rng.random_range(1..w)) % w;
            u = gates::cnot(c, t, w) * u;
        }
    }
    u
}

impl RandomRules {
    fn unitary(&self, w: usize, seed: u64) -> DMatrix<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self.cfg.family {
            Family::Haar => haar_unitary(1 << w, &mut rng),
            Family::Clifford => random_clifford(w, &mut rng),
        }
    }

    fn last_symbol(t: &Transcript) -> u64 {
        t.last().map_or(0, |s| s.value() as u64 + 1)
    }
}

impl ProtocolRules for RandomRules {
    fn initial_state(&self) -> Result<PureState> {
        let layout = RegisterLayout::with_cap(vec![self.x.clone(), self.y.clone()], usize::MAX)?;
        let w = layout.total_width();
        let seed = derive_seed(&[self.cfg.seed, INIT]);
        let v: DVector<C64> = match self.cfg.family {
            Family::Haar => self.unitary(w, seed).column(0).into_owned(),
            Family::Clifford => {
                // Bell pairs between X and Y, scrambled locally on each side
                let (wx, wy) = (self.x.width, self.y.width);
                let mut bell = DVector::zeros(1 << w);
                for k in 0..1usize << wx.min(wy) {
                    bell[(k << (wx - wx.min(wy)) << wy) | k] = C64::new(1.0, 0.0);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let ux = random_clifford(wx, &mut rng);
                let uy = random_clifford(wy, &mut rng);
                kron(&ux, &uy) * bell
            }
        };
        PureState::normalized(layout, v)
    }

    fn query_width(&self) -> usize {
        1
    }

    fn answer_width(&self) -> usize {
        1
    }

    fn alice_update(&self, step: usize, transcript: &Transcript) -> Result<Isometry> {
        let seed = derive_seed(&[self.cfg.seed, ALICE, step as u64, Self::last_symbol(transcript)]);
        let u = self.unitary(self.x.width + 1, seed);
        Isometry::from_unitary_on_fresh(vec![self.x.clone()], vec![query_register(1)], &u)
    }

    fn bob_update(&self, step: usize, transcript: &Transcript) -> Result<Isometry> {
        let seed = derive_seed(&[self.cfg.seed, BOB, step as u64, Self::last_symbol(transcript)]);
        let u = self.unitary(self.y.width + 1, seed);
        Isometry::from_unitary_on_fresh(vec![self.y.clone()], vec![answer_register(1)], &u)
    }

    fn memory(&self, _step: usize, _transcript: &Transcript) -> String {
        String::new()
    }
}

/// A protocol whose every isometry is a seeded random unitary on the party's
/// register and a fresh message qubit, chosen from the step and the last symbol.
pub fn random_protocol(cfg: RandomProtocolConfig) -> Result<ProtocolSpec> {
    if !(1..=2).contains(&cfg.x_width) || !(1..=2).contains(&cfg.y_width) {
        return Err(Error::InvalidConfig("random protocols use 1 or 2 qubits per party".into()));
    }
    let rules = RandomRules {
        cfg,
        x: Register::new("X", cfg.x_width, Owner::Alice),
        y: Register::new("Y", cfg.y_width, Owner::Bob),
    };
    let family = match cfg.family {
        Family::Haar => "haar",
        Family::Clifford => "clifford",
    };
    ProtocolSpec::new(
        "random",
        format!(
            "random {family} x={} y={} t={} seed={}",
            cfg.x_width, cfg.y_width, cfg.t, cfg.seed
        ),
        cfg.t,
        usize::MAX,
        DEFAULT_QUBIT_CAP,
        Arc::new(rules),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_specs_are_reproducible() {
        for family in [Family::Haar, Family::Clifford] {
            let cfg = RandomProtocolConfig {
                family,
                x_width: 2,
                y_width: 1,
                t: 2,
                seed: 9,
            };
            let a = random_protocol(cfg).unwrap();
            let b = random_protocol(cfg).unwrap();
            assert_eq!(a.initial_state(), b.initial_state());
            let t = Transcript::alternating(&["1", "0"]);
            assert_eq!(
                a.rules().alice_update(1, &t).unwrap(),
                b.rules().alice_update(1, &t).unwrap()
            );
        }
    }

    #[test]
    fn clifford_circuits_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for w in 1..=3 {
            let u = random_clifford(w, &mut rng);
            let dev = (u.adjoint() * &u - DMatrix::identity(1 << w, 1 << w)).camax();
            assert!(dev < 1e-12);
        }
    }

    #[test]
    fn clifford_protocols_start_entangled() {
        for (x, y) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let spec = random_protocol(RandomProtocolConfig {
                family: Family::Clifford,
                x_width: x,
                y_width: y,
                t: 1,
                seed: 5,
            })
            .unwrap();
            assert!((spec.initial_entropy() - x.min(y) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn widths_are_validated() {
        let cfg = RandomProtocolConfig {
            family: Family::Haar,
            x_width: 3,
            y_width: 1,
            t: 1,
            seed: 0,
        };
        assert!(random_protocol(cfg).is_err());
    }
}
