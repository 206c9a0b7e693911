//! Exact, small-scale simulation of impersonation attacks on quantum parties
//! that talk over classical channels.
//!
//! The crate is layered bottom-up:
//!
//! * [`qcore`]: states, isometries, partial trace and measurement on named registers.
//! * [`cq`]: classical-quantum ensembles keyed by transcripts.
//! * [`infomeasures`]: entropies, mutual information, distances and inequality checks.
//! * [`protocol`]: the two-party interaction engine with entropy instrumentation.
//! * [`distinguisher`]: a closing exchange in which one party announces a measurement of its private state.
//! * [`attack`]: the passive-then-forge adversary and its hybrid analysis.
//! * [`schemes`]: concrete protocols (random, trigger, EPR authentication, toy money).
//! * [`oraclesim`]: sampled classical oracles with query logs.

pub mod attack;
pub mod cq;
pub mod distinguisher;
pub mod error;
pub mod infomeasures;
pub mod oraclesim;
pub mod protocol;
pub mod qcore;
pub mod schemes;
pub mod tol;

pub use error::{Error, Result};
