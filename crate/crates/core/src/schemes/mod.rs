//! Concrete protocol instances.

mod alternating;
mod epr_auth;
mod money;
mod random;
mod trigger;

pub use alternating::alternating_basis;
pub use epr_auth::{epr_auth, AuthScheme};
pub use money::{accept_projector, note_amplitudes, QueryModel, ToyMoneyScheme, MAX_NOTE_QUBITS};
pub(crate) use money::slot;
pub use random::{random_protocol, Family, RandomProtocolConfig};
pub use trigger::{trigger_protocol, trigger_protocol_with_first_trigger, TriggerKey};

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::protocol::{ANSWER, QUERY};
use crate::qcore::linalg::gates;
use crate::qcore::{Isometry, Owner, PureState, Register, RegisterLayout};

pub(crate) fn query_register(width: usize) -> Register {
    Register::new(QUERY, width, Owner::Message)
}

pub(crate) fn answer_register(width: usize) -> Register {
    Register::new(ANSWER, width, Owner::Message)
}

/// Bit `q` (0 = most significant) of a `width`-bit value.
pub(crate) fn bit(x: usize, q: usize, width: usize) -> usize {
    (x >> (width - 1 - q)) & 1
}

/// `|x⟩ ↦ |x⟩|value⟩` on a fresh register.
pub(crate) fn constant(inputs: Vec<Register>, out: Register, value: usize) -> Result<Isometry> {
    Isometry::classical(inputs, vec![out], move |_| value)
}

/// Non-demolition measurement of qubit `q` of `reg` in the Z (or X) basis, recorded in `out`.
pub(crate) fn coherent_measure(reg: &Register, q: usize, x_basis: bool, out: Register) -> Result<Isometry> {
    let w = reg.width;
    let copy = Isometry::classical(vec![reg.clone()], vec![out], move |x| bit(x, q, w))?;
    if !x_basis {
        return Ok(copy);
    }
    let h = Isometry::unitary(vec![reg.clone()], gates::on_qubit(&gates::hadamard(), q, w))?;
    h.then(&copy)?.then(&h)
}

/// `Σ_x |x⟩_X |x⟩_Y / √2ⁿ` restricted to keys accepted by `keep`.
pub(crate) fn correlated_copies(x: Register, y: Register, keep: impl Fn(usize) -> bool) -> Result<PureState> {
    let w = x.width;
    let layout = RegisterLayout::new(vec![x, y])?;
    let mut v = DVector::zeros(layout.dim());
    for k in (0..1usize << w).filter(|&k| keep(k)) {
        v[(k << w) | k] = C64::new(1.0, 0.0);
    }
    PureState::normalized(layout, v)
}
