//! Dense linear algebra over named multi-qubit registers.

mod ensemble;
mod layout;
pub mod linalg;
mod ops;
mod state;

pub use ensemble::Ensemble;
pub use layout::{bits, parse_bits, Owner, Register, RegisterLayout, DEFAULT_QUBIT_CAP};
pub use ops::{
    apply_isometry, apply_isometry_pure, dephase, measure, partial_trace, partial_trace_pure, purify, tensor,
    tensor_pure, Outcome,
};
pub use state::{DensityOperator, Isometry, PureState};
