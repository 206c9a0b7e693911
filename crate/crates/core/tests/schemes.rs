mod common;

use common::corpus;
use qimp::infomeasures::{statistical_distance, trace_distance};
use qimp::oraclesim::QueryLog;
use qimp::protocol::{init, round_distribution, run, run_snapshots, EngineOptions};
use qimp::qcore::{DensityOperator, RegisterLayout};
use qimp::schemes::{epr_auth, trigger_protocol_with_first_trigger, ToyMoneyScheme};
use qimp::Error;

#[test]
fn epr_auth_is_complete() {
    for pairs in 1..=3 {
        let s = epr_auth(pairs, pairs).unwrap();
        assert!((s.completeness - 1.0).abs() < 1e-9);
        // reused pairs repeat deterministically and are still accepted
        let s = epr_auth(pairs, 2 * pairs + 1).unwrap();
        assert!((s.completeness - 1.0).abs() < 1e-9);
    }
    assert!(matches!(epr_auth(6, 1), Err(Error::QubitCapExceeded { .. })));
}

#[test]
fn trigger_round_is_a_discontinuity() {
    let opts = EngineOptions::default();
    for r in 2..=5 {
        let spec = trigger_protocol_with_first_trigger(4, 16, r).unwrap();
        let honest = run_snapshots(&spec, r, r, &opts).unwrap();
        let before = round_distribution(&spec, &honest.snapshots[r - 2], r - 1, &[], &opts).unwrap();
        let at = round_distribution(&spec, &honest.snapshots[r - 1], r, &[], &opts).unwrap();
        let strip = |d: &qimp::cq::Distribution| -> qimp::cq::Distribution {
            let mut out = qimp::cq::Distribution::new();
            for (k, p) in d {
                *out.entry(k[k.len() - 2..].to_string()).or_insert(0.0) += p;
            }
            out
        };
        assert!((statistical_distance(&strip(&before), &strip(&at)) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn money_protocol_starts_from_the_minted_note() {
    let scheme = ToyMoneyScheme::new(2, 9).unwrap();
    let known = scheme.spec_with_known_oracle().unwrap();
    let s = init(&known).unwrap();
    let note = s.branches().next().unwrap().state.reduced(&["X"]).unwrap();
    let minted = scheme.mint(&mut QueryLog::new()).unwrap().to_density();
    assert!(trace_distance(&note, &minted).unwrap() < 1e-12);
    assert!(known.initial_entropy().abs() < 1e-12);
    // averaged over oracles the note is maximally mixed
    let sampled = scheme.spec().unwrap();
    let s = init(&sampled).unwrap();
    let note = s.branches().next().unwrap().state.reduced(&["X"]).unwrap();
    let mixed = DensityOperator::maximally_mixed(RegisterLayout::new(vec![scheme.note_register()]).unwrap());
    assert!(trace_distance(&note, &mixed).unwrap() < 1e-12);
    assert!((sampled.initial_entropy() - 2.0).abs() < 1e-9);
    // honest verifications always accept: the verdict message of every round is 1
    let opts = EngineOptions::default();
    let honest = run_snapshots(&sampled, 3, 3, &opts).unwrap();
    let round_len = 3 * (3 + 2);
    for r in 1..=3 {
        let d = round_distribution(&sampled, &honest.snapshots[r - 1], r, &[], &opts).unwrap();
        for key in d.keys() {
            let verdict = &key[(r - 1) * round_len + 10..(r - 1) * round_len + 13];
            assert_eq!(verdict, "001");
        }
    }
    assert!(matches!(ToyMoneyScheme::new(3, 0).unwrap().spec(), Err(Error::QubitCapExceeded { .. })));
}

#[test]
fn corpus_telescopes() {
    for (spec, _) in corpus().into_iter().filter(|(s, _)| !s.description().contains("haar")) {
        let h = spec.initial_entropy();
        let (_, traces) = run(&spec, 8, &EngineOptions::default()).unwrap();
        let yq: f64 = traces.iter().map(|s| s.cmi_yq).sum();
        let xa: f64 = traces.iter().map(|s| s.cmi_xa).sum();
        assert!(yq <= h + 1e-6 && xa <= h + 1e-6, "{}", spec.description());
    }
}
