#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use qimp::cq::Transcript;
use qimp::protocol::{ProtocolRules, ProtocolSpec, ANSWER, QUERY};
use qimp::qcore::{Isometry, Owner, PureState, Register, RegisterLayout, DEFAULT_QUBIT_CAP};
use qimp::schemes::{
    alternating_basis, epr_auth, random_protocol, trigger_protocol, Family, RandomProtocolConfig, ToyMoneyScheme,
};
use qimp::Result;

pub fn q1() -> Register {
    Register::new(QUERY, 1, Owner::Message)
}

pub fn a1() -> Register {
    Register::new(ANSWER, 1, Owner::Message)
}

pub fn x1() -> Register {
    Register::new("X", 1, Owner::Alice)
}

pub fn y1() -> Register {
    Register::new("Y", 1, Owner::Bob)
}

pub fn bell() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = DVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]);
    PureState::new(RegisterLayout::new(vec![x1(), y1()]).unwrap(), v).unwrap()
}

/// Alice reads her qubit (in |+⟩) into the message; Bob echoes it.
#[derive(Debug)]
pub struct Echo;

impl ProtocolRules for Echo {
    fn initial_state(&self) -> Result<PureState> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = DVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)]);
        PureState::new(RegisterLayout::new(vec![x1(), y1()])?, v)
    }
    fn query_width(&self) -> usize {
        1
    }
    fn answer_width(&self) -> usize {
        1
    }
    fn alice_update(&self, _: usize, _: &Transcript) -> Result<Isometry> {
        Isometry::classical(vec![x1()], vec![q1()], |x| x)
    }
    fn bob_update(&self, _: usize, t: &Transcript) -> Result<Isometry> {
        let q = t.last().unwrap().value();
        Isometry::classical(vec![y1()], vec![a1()], move |_| q)
    }
}

/// Bell pair; both parties always send 0.
#[derive(Debug)]
pub struct Silent;

impl ProtocolRules for Silent {
    fn initial_state(&self) -> Result<PureState> {
        Ok(bell())
    }
    fn query_width(&self) -> usize {
        1
    }
    fn answer_width(&self) -> usize {
        1
    }
    fn alice_update(&self, _: usize, _: &Transcript) -> Result<Isometry> {
        Isometry::classical(vec![x1()], vec![q1()], |_| 0)
    }
    fn bob_update(&self, _: usize, _: &Transcript) -> Result<Isometry> {
        Isometry::classical(vec![y1()], vec![a1()], |_| 0)
    }
}

pub fn custom(name: &str, t: usize, rules: impl ProtocolRules + 'static) -> ProtocolSpec {
    ProtocolSpec::new(name, name, t, usize::MAX, DEFAULT_QUBIT_CAP, Arc::new(rules)).unwrap()
}

pub fn random(family: Family, x: usize, y: usize, t: usize, seed: u64) -> ProtocolSpec {
    random_protocol(RandomProtocolConfig {
        family,
        x_width: x,
        y_width: y,
        t,
        seed,
    })
    .unwrap()
}

/// Specs with horizons for the bound checks.
pub fn corpus() -> Vec<(ProtocolSpec, usize)> {
    let mut out = Vec::new();
    for (i, (x, y, t, k)) in [(1, 1, 1, 8), (1, 2, 1, 16), (2, 1, 1, 32), (1, 1, 2, 8), (2, 1, 2, 16), (1, 1, 1, 64)]
        .into_iter()
        .enumerate()
    {
        out.push((random(Family::Clifford, x, y, t, 100 + i as u64), k));
    }
    for seed in 0..3 {
        out.push((random(Family::Haar, 1, 1, 1, seed), 8));
    }
    for k in [8, 16, 32, 64] {
        out.push((epr_auth(2, 2).unwrap().spec, k));
    }
    out.push((trigger_protocol(3, 8).unwrap(), 8));
    out.push((trigger_protocol(4, 16).unwrap(), 16));
    out.push((alternating_basis(2).unwrap(), 16));
    let money = ToyMoneyScheme::new(1, 5).unwrap();
    out.push((money.spec().unwrap(), 8));
    out.push((money.spec().unwrap(), 32));
    out.push((ToyMoneyScheme::new(2, 6).unwrap().spec().unwrap(), 16));
    out
}
