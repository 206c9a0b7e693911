mod common;

use std::collections::BTreeMap;

use common::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use qimp::cq::{Symbol, Transcript};
use qimp::infomeasures::{statistical_distance, trace_distance};
use qimp::protocol::{entropy_trace_monotone, init, posterior, run, step, EngineOptions, ProtocolSpec};
use qimp::qcore::linalg::{gates, kron};
use qimp::qcore::{bits, Owner, PureState, Register, RegisterLayout};
use qimp::schemes::{alternating_basis, epr_auth, AuthScheme, Family};

fn unlumped() -> EngineOptions {
    EngineOptions {
        lump: false,
        ..EngineOptions::default()
    }
}

#[test]
fn init_is_a_single_pure_branch() {
    let spec = epr_auth(2, 1).unwrap().spec;
    let s = init(&spec).unwrap();
    assert_eq!(s.len(), 1);
    let b = s.branches().next().unwrap();
    assert!(b.transcript.is_empty());
    assert!(b.state.is_pure());
    assert_eq!(b.state.layout().names(), vec!["X", "Y", "Q"]);
    let (s0, traces) = run(&spec, 0, &EngineOptions::default()).unwrap();
    assert!(traces.is_empty());
    assert_eq!(s0.len(), 1);
    assert!(trace_distance(&s0.average(), &s.average()).unwrap() < 1e-15);
}

#[test]
fn epr_auth_first_step_has_four_even_branches() {
    let spec = epr_auth(2, 1).unwrap().spec;
    let s = step(&spec, &init(&spec).unwrap(), 1, &unlumped()).unwrap();
    let m = s.classical_marginal();
    assert_eq!(m.len(), 4);
    for (k, p) in &m {
        assert!((p - 0.25).abs() < 1e-12, "{k}");
        assert!(AuthScheme::accepted(k));
    }
}

#[test]
fn echo_and_constant_messages() {
    let echo = custom("echo", 1, Echo);
    let (s, _) = run(&echo, 2, &unlumped()).unwrap();
    let keys: Vec<String> = s.classical_marginal().keys().cloned().collect();
    assert_eq!(keys, vec!["0000", "1111"]);
    let silent = custom("silent", 1, Silent);
    let (s, _) = run(&silent, 3, &unlumped()).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s.classical_marginal().keys().next().unwrap(), "000000");
}

/// Coherent simulation: messages stay as qubits and are read out only at the end.
fn deferred_distribution(spec: &ProtocolSpec, steps: usize) -> BTreeMap<String, f64> {
    let rules = spec.rules();
    let init = rules.initial_state().unwrap();
    let wy = spec.initial_state().layout().register("Y").unwrap().width;
    let wx = spec.n();
    let (qw, aw) = (rules.query_width(), rules.answer_width());
    // index = ((x << wy | y) << r) | records
    let mut psi: Vec<C64> = init.amplitudes().iter().copied().collect();
    let mut r = 0usize;
    let mut widths: Vec<usize> = Vec::new();
    let transcript = |rec: usize, widths: &[usize]| {
        let total: usize = widths.iter().sum();
        let mut syms = Vec::new();
        let mut off = total;
        for (i, &w) in widths.iter().enumerate() {
            off -= w;
            let b = bits((rec >> off) & ((1 << w) - 1), w);
            syms.push(if i % 2 == 0 { Symbol::query(b) } else { Symbol::answer(b) });
        }
        Transcript::from_symbols(syms)
    };
    let apply = |psi: &Vec<C64>, r: usize, widths: &[usize], alice: bool, step: usize, ow: usize| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); psi.len() << ow];
        for (idx, &amp) in psi.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let rec = idx & ((1 << r) - 1);
            let xy = idx >> r;
            let (x, y) = (xy >> wy, xy & ((1 << wy) - 1));
            let t = transcript(rec, widths);
            let (iso, input, w) = if alice {
                (rules.alice_update(step, &t).unwrap(), x, wx)
            } else {
                (rules.bob_update(step, &t).unwrap(), y, wy)
            };
            let m = iso.matrix();
            for row in 0..1usize << (w + ow) {
                let a = m[(row, input)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let (reg, msg) = (row >> ow, row & ((1 << ow) - 1));
                let (nx, ny) = if alice { (reg, y) } else { (x, reg) };
                let nidx = (((nx << wy) | ny) << (r + ow)) | (rec << ow) | msg;
                out[nidx] += a * amp;
            }
        }
        out
    };
    psi = apply(&psi, r, &widths, true, 0, qw);
    r += qw;
    widths.push(qw);
    for i in 1..=steps {
        psi = apply(&psi, r, &widths, false, i, aw);
        r += aw;
        widths.push(aw);
        if i < steps {
            psi = apply(&psi, r, &widths, true, i, qw);
            r += qw;
            widths.push(qw);
        }
    }
    let mut dist = BTreeMap::new();
    for (idx, a) in psi.iter().enumerate() {
        let rec = idx & ((1 << r) - 1);
        *dist.entry(transcript(rec, &widths).key()).or_insert(0.0) += a.norm_sqr();
    }
    dist.retain(|_, p| *p > 1e-14);
    dist
}

#[test]
fn deferred_measurement_matches_mid_protocol_measurement() {
    for seed in 0..4 {
        let spec = random(Family::Haar, 1, 1, 1, seed);
        let (s, _) = run(&spec, 3, &unlumped()).unwrap();
        let engine = s.classical_marginal();
        let coherent = deferred_distribution(&spec, 3);
        assert!(statistical_distance(&engine, &coherent) < 1e-9, "seed {seed}");
    }
}

#[test]
fn lumping_does_not_change_traces() {
    let specs = [
        random(Family::Clifford, 1, 1, 2, 4),
        random(Family::Haar, 2, 1, 1, 8),
        epr_auth(2, 2).unwrap().spec,
        alternating_basis(2).unwrap(),
    ];
    for spec in &specs {
        let (a, ta) = run(spec, 4, &EngineOptions::default()).unwrap();
        let (b, tb) = run(spec, 4, &unlumped()).unwrap();
        assert!(a.len() <= b.len());
        for (x, y) in ta.iter().zip(&tb) {
            assert!((x.h_x_given_transcript - y.h_x_given_transcript).abs() < 1e-9);
            assert!((x.cmi_yq - y.cmi_yq).abs() < 1e-9);
            assert!((x.cmi_xa - y.cmi_xa).abs() < 1e-9);
        }
        let ra = a.average();
        let rb = b.average();
        assert!(trace_distance(&ra, &rb).unwrap() < 1e-9);
    }
}

#[test]
fn honest_branches_stay_pure_and_weights_sum_to_one() {
    for seed in 0..10 {
        let spec = random(Family::Haar, 1 + (seed as usize % 2), 1, 1 + (seed as usize % 2), seed);
        let (s, _) = run(&spec, 3, &unlumped()).unwrap();
        assert!((s.total_weight() - 1.0).abs() < 1e-9);
        for b in s.branches() {
            assert!(b.state.is_pure());
            let ev = b.operator().eigenvalues();
            let top = ev.iter().cloned().fold(f64::MIN, f64::max);
            assert!((top - b.weight).abs() < 1e-9);
        }
    }
}

#[test]
fn telescoping_and_pigeonhole() {
    for seed in 0..40u64 {
        let family = if seed % 2 == 0 { Family::Haar } else { Family::Clifford };
        let spec = random(family, 1 + (seed as usize % 2), 1 + (seed as usize / 2 % 2), 1 + usize::from(seed.is_multiple_of(3)), seed);
        let h = spec.initial_entropy();
        let (_, traces) = run(&spec, 3, &EngineOptions::default()).unwrap();
        let yq: f64 = traces.iter().map(|s| s.cmi_yq).sum();
        let xa: f64 = traces.iter().map(|s| s.cmi_xa).sum();
        assert!(yq <= h + 1e-6 && xa <= h + 1e-6, "seed {seed}");
        assert!(traces.iter().all(|s| s.cmi_yq >= -1e-8 && s.cmi_xa >= -1e-8));
        let n = spec.n();
        let min_drop = traces[..n.min(traces.len())]
            .iter()
            .map(|s| s.cmi_yq)
            .fold(f64::MAX, f64::min);
        assert!(min_drop <= h / n as f64 + 1e-6);
        // entropy bookkeeping is exact: each step removes yq + xa
        let mut prev = h;
        for s in &traces {
            assert!((prev - s.cmi_yq - s.cmi_xa - s.h_x_given_transcript).abs() < 1e-8);
            prev = s.h_x_given_transcript;
        }
    }
}

#[test]
fn entropy_is_monotone_on_random_and_alternating_protocols() {
    for seed in 0..200u64 {
        let family = if seed % 2 == 0 { Family::Haar } else { Family::Clifford };
        let spec = random(family, 1 + (seed as usize % 2), 1, 1, seed);
        let (_, traces) = run(&spec, 4, &EngineOptions::default()).unwrap();
        assert!(entropy_trace_monotone(&traces).holds, "seed {seed}");
    }
    for n in 1..=3 {
        let spec = alternating_basis(n).unwrap();
        let (_, traces) = run(&spec, 4 * n, &EngineOptions::default()).unwrap();
        let m = entropy_trace_monotone(&traces);
        assert!(m.holds);
        // the first sweep reveals everything in Z; each later sweep only
        // re-randomizes, yet the conditional entropy never goes back up
        assert!((traces[n - 1].h_x_given_transcript).abs() < 1e-9);
    }
}

#[test]
fn posterior_of_empty_transcript_is_the_initial_marginal() {
    let spec = random(Family::Haar, 1, 1, 1, 3);
    let post = posterior(&spec, &Transcript::new(), &EngineOptions::default()).unwrap();
    let s = init(&spec).unwrap();
    let direct = s.branches().next().unwrap().state.reduced(&spec.alice_with_query()).unwrap();
    assert!(trace_distance(&post, &direct).unwrap() < 1e-12);
    assert!(posterior(&spec, &Transcript::alternating(&["0"]), &EngineOptions::default()).is_err());
}

/// Coherent readout of qubit 0 of a 2-qubit (data, fresh) vector in Z or X.
fn readout(v: DVector<C64>, x_basis: bool) -> DVector<C64> {
    if x_basis {
        let hx = kron(&gates::hadamard(), &DMatrix::identity(2, 2));
        &hx * gates::cnot(0, 1, 2) * &hx * v
    } else {
        gates::cnot(0, 1, 2) * v
    }
}

fn ket(i: usize, dim: usize) -> DVector<C64> {
    let mut v = DVector::from_element(dim, C64::new(0.0, 0.0));
    v[i] = C64::new(1.0, 0.0);
    v
}

#[test]
fn posterior_after_one_epr_round_matches_hand_computation() {
    // one pair: the second round reuses it in Z, so Alice's next report repeats her outcome
    let spec = epr_auth(1, 1).unwrap().spec;
    let layout = RegisterLayout::new(vec![
        Register::new("X", 1, Owner::Alice),
        Register::new("Q", 1, Owner::Message),
    ])
    .unwrap();
    for outcome in 0..2 {
        let t = Transcript::alternating(&[outcome.to_string(), "10".to_string()]);
        let post = posterior(&spec, &t, &EngineOptions::default()).unwrap();
        let hand = PureState::new(layout.clone(), readout(ket(outcome << 1, 4), false))
            .unwrap()
            .to_density();
        assert!(trace_distance(&post, &hand).unwrap() < 1e-9);
    }
    assert!(posterior(&spec, &Transcript::alternating(&["0", "00"]), &EngineOptions::default()).is_err());

    // two pairs: the fresh pair's half is maximally mixed and read out in the challenged basis
    let spec = epr_auth(2, 1).unwrap().spec;
    let layout = RegisterLayout::new(vec![
        Register::new("X", 2, Owner::Alice),
        Register::new("Q", 1, Owner::Message),
    ])
    .unwrap();
    for outcome in 0..2 {
        for challenge in 0..2 {
            let t = Transcript::alternating(&[outcome.to_string(), format!("1{challenge}")]);
            let post = posterior(&spec, &t, &EngineOptions::default()).unwrap();
            let mut m = DMatrix::<C64>::zeros(8, 8);
            for b in 0..2 {
                let v = ket(outcome, 2).kronecker(&readout(ket(b << 1, 4), challenge == 1));
                m += &v * v.adjoint() * C64::new(0.5, 0.0);
            }
            let hand = qimp::qcore::DensityOperator::new(layout.clone(), m).unwrap();
            assert!(trace_distance(&post, &hand).unwrap() < 1e-9);
        }
    }
}

#[test]
fn posterior_of_leaked_key_is_pure() {
    let spec = alternating_basis(2).unwrap();
    let t = Transcript::alternating(&["1", "0", "0", "0"]);
    let post = posterior(&spec, &t, &EngineOptions::default()).unwrap();
    let ev = post.eigenvalues();
    assert!((ev.iter().cloned().fold(f64::MIN, f64::max) - 1.0).abs() < 1e-9);
}
