mod common;

use common::*;
use qimp::attack::{
    cloning_adversary, hybrid_ladder, impersonate, impersonate_with_prior, required_rounds, AttackConfig, AttackOptions,
    OracleView, RoundChoice,
};
use qimp::protocol::EngineOptions;
use qimp::schemes::{epr_auth, trigger_protocol, trigger_protocol_with_first_trigger, AuthScheme, Family, ToyMoneyScheme};

#[test]
fn corpus_stays_within_bound() {
    // the Haar instances are slow and covered by the acceptance run
    for (spec, k) in corpus().into_iter().filter(|(s, _)| !s.description().contains("haar")) {
        let start = std::time::Instant::now();
        let cfg = AttackConfig::with_horizon(k).unwrap();
        let out = impersonate(&spec, &cfg, RoundChoice::Uniform, &AttackOptions::default()).unwrap();
        eprintln!(
            "{} K={k}: d={:.6} trace={:.6} bound={:.6} ({:?})",
            spec.description(),
            out.distance,
            out.trace_bound,
            out.bound,
            start.elapsed()
        );
        assert!(out.within_bound(), "{}", spec.description());
        assert!(out.distance <= out.trace_bound + 1e-8);
        assert!(out.trace_bound <= out.bound + 1e-8);
        assert!(out.bound <= out.relaxed_bound + 1e-12);
    }
}

#[test]
fn transcript_independent_messages_are_forged_perfectly() {
    let spec = custom("silent", 1, Silent);
    let cfg = AttackConfig::with_horizon(8).unwrap();
    let out = impersonate(&spec, &cfg, RoundChoice::Uniform, &AttackOptions::default()).unwrap();
    assert!(out.per_round.iter().all(|r| r.distance < 1e-12));
}

#[test]
fn ladder_matches_impersonation_and_pinsker() {
    let specs = [
        random(Family::Clifford, 1, 1, 2, 3),
        random(Family::Haar, 1, 1, 1, 1),
        epr_auth(2, 2).unwrap().spec,
        trigger_protocol(3, 8).unwrap(),
    ];
    for spec in &specs {
        for k in 1..=3 {
            let cfg = AttackConfig::with_horizon(4).unwrap();
            let opts = AttackOptions {
                ladder: true,
                ..AttackOptions::default()
            };
            let out = impersonate(spec, &cfg, RoundChoice::Fixed(k), &opts).unwrap();
            let ladder = hybrid_ladder(spec, k, &EngineOptions::default()).unwrap();
            assert!((ladder.end_to_end - out.distance).abs() < 1e-9, "{}", spec.description());
            assert!((out.ladder_end_to_end().unwrap() - out.distance).abs() < 1e-9);
            let sum: f64 = ladder.steps.iter().map(|s| s.distance).sum();
            assert!(sum + 1e-9 >= ladder.end_to_end);
            for s in &ladder.steps {
                assert!(s.distance <= s.expected_delta + 1e-8, "{} {}->{}", spec.description(), s.from, s.to);
                assert!(s.expected_delta <= s.pinsker_bound + 1e-8);
            }
        }
    }
}

#[test]
fn product_spec_has_a_flat_ladder() {
    let spec = custom("echo", 1, Echo);
    let ladder = hybrid_ladder(&spec, 2, &EngineOptions::default()).unwrap();
    assert!(ladder.steps.iter().all(|s| s.distance < 1e-12));
}

#[test]
fn trigger_separates_fixed_and_uniform_eve() {
    let (n, horizon) = (4, 16);
    let prior = trigger_protocol(n, horizon).unwrap();
    let k = 1;
    let actual = trigger_protocol_with_first_trigger(n, horizon, k + 1).unwrap();
    let d = impersonate_with_prior(&actual, &prior, k, &EngineOptions::default()).unwrap();
    assert!((d - (1.0 - 1.0 / 15.0)).abs() < 1e-9, "{d}");
    let cfg = AttackConfig::with_horizon(horizon).unwrap();
    let out = impersonate(&prior, &cfg, RoundChoice::Uniform, &AttackOptions::default()).unwrap();
    assert!(out.within_bound());
    assert!(out.distance <= 1.0 / horizon as f64 + out.relaxed_bound + 1e-8);
}

#[test]
fn epr_forgery_is_accepted() {
    let eps = 0.5;
    let scheme = epr_auth(2, 2).unwrap();
    assert!((scheme.completeness - 1.0).abs() < 1e-9);
    let k = required_rounds(scheme.spec.n(), scheme.spec.t(), eps).unwrap();
    assert_eq!(k, 24);
    let cfg = AttackConfig::from_epsilon(scheme.spec.n(), scheme.spec.t(), eps).unwrap();
    let opts = AttackOptions {
        keep_distributions: true,
        ..AttackOptions::default()
    };
    let out = impersonate(&scheme.spec, &cfg, RoundChoice::Uniform, &opts).unwrap();
    let acc = AuthScheme::acceptance(out.forged_distribution.as_ref().unwrap());
    assert!((acc - (1.0 - 0.5 / 24.0)).abs() < 1e-9, "{acc}");
    assert!(acc >= scheme.completeness - eps);
    let fresh = impersonate(&scheme.spec, &cfg, RoundChoice::Fixed(1), &opts).unwrap();
    assert!((AuthScheme::acceptance(fresh.forged_distribution.as_ref().unwrap()) - 0.5).abs() < 1e-9);
}

#[test]
fn money_is_cloned() {
    let scheme = ToyMoneyScheme::new(1, 5).unwrap();
    let cfg = AttackConfig::with_horizon(8).unwrap();
    let out = cloning_adversary(&scheme, &cfg, RoundChoice::Uniform, OracleView::Sampled, &EngineOptions::default()).unwrap();
    assert!(out.both >= 0.25);
    assert!(out.both + 1e-12 >= out.union_bound);
    let known = cloning_adversary(&scheme, &cfg, RoundChoice::Uniform, OracleView::Known, &EngineOptions::default()).unwrap();
    assert!((known.both - known.retained * known.retained).abs() < 1e-9);
    assert!((known.both - 1.0).abs() < 1e-9);
}
