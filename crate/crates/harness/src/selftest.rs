use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qimp::attack::{hybrid_ladder, impersonate, required_rounds, AttackConfig, AttackOptions, RoundChoice};
use qimp::infomeasures::{araki_lieb_check, pinsker_check};
use qimp::protocol::{entropy_trace_monotone, run, EngineOptions, ProtocolSpec};
use qimp::qcore::linalg::haar_unitary;
use qimp::qcore::{partial_trace, DensityOperator, Owner, PureState, Register, RegisterLayout};
use qimp::schemes::{alternating_basis, epr_auth, random_protocol, trigger_protocol, Family, RandomProtocolConfig};
use qimp::tol;

use crate::error::Result;

/// Outcome of one invariant family.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

/// Sizes of the randomized parts of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    pub states: usize,
    pub protocols: usize,
}

impl Scale {
    pub const QUICK: Scale = Scale {
        states: 200,
        protocols: 40,
    };
    pub const FULL: Scale = Scale {
        states: 1000,
        protocols: 200,
    };
}

/// Random protocol number `i` of the randomized families.
pub fn random_spec(i: u64) -> Result<ProtocolSpec> {
    let family = if i.is_multiple_of(2) { Family::Haar } else { Family::Clifford };
    Ok(random_protocol(RandomProtocolConfig {
        family,
        x_width: 1 + (i as usize % 2),
        y_width: 1 + (i as usize / 2 % 2),
        t: 1,
        seed: i,
    })?)
}

/// Reduced state of a Haar-random vector on one-qubit registers `names` plus `env` traced-out qubits.
pub fn random_state(rng: &mut ChaCha8Rng, names: &[&str], env: usize) -> Result<DensityOperator> {
    let mut regs: Vec<Register> = names.iter().map(|n| Register::new(*n, 1, Owner::Alice)).collect();
    if env > 0 {
        regs.push(Register::new("E", env, Owner::Environment));
    }
    let layout = RegisterLayout::new(regs)?;
    let v = haar_unitary(layout.dim(), rng).column(0).into_owned();
    Ok(partial_trace(&PureState::new(layout, v)?.to_density(), names)?)
}

fn bell() -> Result<DensityOperator> {
    let layout = RegisterLayout::new(vec![Register::new("A", 1, Owner::Alice), Register::new("B", 1, Owner::Bob)])?;
    let s = 0.5f64.sqrt();
    let v = DVector::from_iterator(4, [s, 0.0, 0.0, s].map(|a| C64::new(a, 0.0)));
    Ok(PureState::new(layout, v)?.to_density())
}

pub fn budget() -> Check {
    let k = required_rounds(2, 1, 0.5).ok();
    Check::new("budget formula", k == Some(24), format!("n=2 t=1 eps=0.5 gives K={k:?}"))
}

/// Pinsker and Araki–Lieb on random states, plus the Bell spot values.
pub fn inequalities(count: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_pinsker = f64::INFINITY;
    let mut worst_al = f64::INFINITY;
    for _ in 0..count {
        let env = rng.random_range(0..=2);
        let rho = random_state(&mut rng, &["A", "B"], env)?;
        worst_pinsker = worst_pinsker.min(pinsker_check(&rho, &["A"], &["B"])?.slack);
        let al = araki_lieb_check(&rho, &["A"], &["B"])?;
        worst_al = worst_al.min(al.lower.slack.min(al.upper.slack));
    }
    let b = bell()?;
    let al = araki_lieb_check(&b, &["A"], &["B"])?;
    let p = pinsker_check(&b, &["A"], &["B"])?;
    let spots = (al.lower.slack).abs() < 1e-9 && (al.upper.slack - 2.0).abs() < 1e-9 && (p.lhs - 1.5).abs() < 1e-9;
    let passed = worst_pinsker >= -tol::INEQUALITY && worst_al >= -tol::INEQUALITY && spots;
    Ok(Check::new(
        "pinsker and araki-lieb",
        passed,
        format!(
            "{count} states, min slack pinsker {worst_pinsker:.3e} araki-lieb {worst_al:.3e}; bell slacks ({:.3}, {:.3}) pinsker lhs {:.6}",
            al.lower.slack, al.upper.slack, p.lhs
        ),
    ))
}

/// `H(X | transcript)` never increases, on random protocols and the alternating-basis example.
pub fn monotonicity(count: usize) -> Result<Check> {
    let opts = EngineOptions::default();
    let mut bad = Vec::new();
    let mut checked = 0;
    let mut one = |label: String, spec: &ProtocolSpec, rounds: usize| -> Result<()> {
        let (_, traces) = run(spec, rounds, &opts)?;
        let first = traces.first().map_or(0.0, |s| s.h_x_given_transcript);
        if !entropy_trace_monotone(&traces).holds || first > spec.initial_entropy() + tol::INEQUALITY {
            bad.push(label);
        }
        checked += 1;
        Ok(())
    };
    for i in 0..count as u64 {
        one(format!("random #{i}"), &random_spec(i)?, 4)?;
    }
    for n in 1..=3 {
        one(format!("alternating n={n}"), &alternating_basis(n)?, 4 * n)?;
    }
    Ok(Check::new(
        "entropy monotonicity",
        bad.is_empty(),
        format!("{checked} protocols, violations: {bad:?}"),
    ))
}

/// Per-step information sums stay below `H(X)`.
pub fn telescoping(specs: &[(ProtocolSpec, usize)], opts: &EngineOptions) -> Result<Check> {
    let mut worst = f64::INFINITY;
    for (spec, rounds) in specs {
        let h = spec.initial_entropy();
        let (_, traces) = run(spec, *rounds, opts)?;
        let yq: f64 = traces.iter().map(|s| s.cmi_yq).sum();
        let xa: f64 = traces.iter().map(|s| s.cmi_xa).sum();
        worst = worst.min(h - yq).min(h - xa);
    }
    Ok(Check::new(
        "telescoping sums",
        worst >= -1e-6,
        format!("{} specs, min slack {worst:.3e}", specs.len()),
    ))
}

/// The hybrid ladder's endpoints reproduce the attack and each rung obeys Pinsker.
pub fn ladder(specs: &[ProtocolSpec], k: usize, opts: &EngineOptions) -> Result<Check> {
    let mut worst_gap: f64 = 0.0;
    let mut worst_rung = f64::INFINITY;
    for spec in specs {
        let l = hybrid_ladder(spec, k, opts)?;
        let cfg = AttackConfig::with_horizon(k)?;
        let attack = AttackOptions {
            engine: *opts,
            ..AttackOptions::default()
        };
        let d = impersonate(spec, &cfg, RoundChoice::Fixed(k), &attack)?.distance;
        worst_gap = worst_gap.max((l.end_to_end - d).abs());
        for s in &l.steps {
            worst_rung = worst_rung.min(s.pinsker_bound - s.distance);
        }
    }
    Ok(Check::new(
        "hybrid ladder",
        worst_gap <= 1e-9 && worst_rung >= -tol::INEQUALITY,
        format!("{} specs, max endpoint gap {worst_gap:.3e}, min rung slack {worst_rung:.3e}", specs.len()),
    ))
}

/// Uniform-`k` distance within the bound.
pub fn bound(specs: &[(ProtocolSpec, usize)], opts: &EngineOptions) -> Result<Check> {
    let mut worst = f64::INFINITY;
    for (spec, horizon) in specs {
        let attack = AttackOptions {
            engine: *opts,
            ..AttackOptions::default()
        };
        let out = impersonate(spec, &AttackConfig::with_horizon(*horizon)?, RoundChoice::Uniform, &attack)?;
        worst = worst.min(out.bound - out.distance);
    }
    Ok(Check::new(
        "distance bound",
        worst >= -tol::INEQUALITY,
        format!("{} specs, min slack {worst:.3e}", specs.len()),
    ))
}

/// The invariant suite at the given scale.
pub fn run_all(scale: Scale) -> Result<Vec<Check>> {
    let opts = EngineOptions::default();
    let mut small = Vec::new();
    for i in 0..6u64 {
        let spec = random_protocol(RandomProtocolConfig {
            family: Family::Clifford,
            x_width: 1 + (i as usize % 2),
            y_width: 1 + (i as usize / 2 % 2),
            t: 1 + usize::from(i.is_multiple_of(3)),
            seed: 100 + i,
        })?;
        small.push((spec, 8));
    }
    small.push((epr_auth(2, 1)?.spec, 8));
    small.push((trigger_protocol(3, 8)?, 8));
    small.push((alternating_basis(2)?, 8));
    let ladder_specs: Vec<ProtocolSpec> = small.iter().take(4).map(|(s, _)| s.clone()).collect();
    Ok(vec![
        budget(),
        inequalities(scale.states, 7)?,
        monotonicity(scale.protocols)?,
        telescoping(&small, &opts)?,
        bound(&small, &opts)?,
        ladder(&ladder_specs, 2, &opts)?,
    ])
}
