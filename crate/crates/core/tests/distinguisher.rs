mod common;

use common::*;
use qimp::attack::{impersonate, AttackConfig, AttackOptions, RoundChoice};
use qimp::cq::Distribution;
use qimp::distinguisher::{with_distinguisher_round, Distinguisher};
use qimp::protocol::{entropy_trace_monotone, round_distribution, run, run_snapshots, EngineOptions, ProtocolSpec};
use qimp::qcore::linalg::gates;
use qimp::qcore::Owner;
use qimp::schemes::Family;

fn first_round(spec: &ProtocolSpec) -> Distribution {
    let opts = EngineOptions::default();
    let s = run_snapshots(spec, 0, 0, &opts).unwrap();
    round_distribution(spec, &s.snapshots[0], 1, &[], &opts).unwrap()
}

#[test]
fn alice_check_reveals_her_half() {
    let spec = custom("silent", 1, Silent);
    let checked = with_distinguisher_round(&spec, Distinguisher::computational(Owner::Alice, 1, 1)).unwrap();
    assert_eq!(checked.t(), 2);
    let d = first_round(&checked);
    assert_eq!(d.len(), 2);
    assert!((d["0000"] - 0.5).abs() < 1e-12 && (d["0010"] - 0.5).abs() < 1e-12);
    let (_, traces) = run(&checked, 2, &EngineOptions::default()).unwrap();
    assert!((traces[0].h_x_given_transcript - 1.0).abs() < 1e-9);
    assert!(traces[1].h_x_given_transcript.abs() < 1e-9);
    assert!((traces[1].cmi_yq - 1.0).abs() < 1e-9);
}

#[test]
fn bob_check_answers_in_the_closing_exchange() {
    let spec = custom("silent", 1, Silent);
    let checked = with_distinguisher_round(&spec, Distinguisher::computational(Owner::Bob, 1, 0)).unwrap();
    let d = first_round(&checked);
    assert!((d["0000"] - 0.5).abs() < 1e-12 && (d["0001"] - 0.5).abs() < 1e-12);
}

#[test]
fn closing_exchange_leaves_the_inner_round_intact() {
    for seed in 0..12u64 {
        let t = 1 + (seed % 2) as usize;
        let spec = random(Family::Clifford, 1 + (seed / 2 % 2) as usize, 1 + (seed / 4 % 2) as usize, t, seed);
        let party = if seed % 3 == 0 { Owner::Alice } else { Owner::Bob };
        let regs = if party == Owner::Alice { spec.alice_registers() } else { spec.bob_registers() };
        let w: usize = regs.iter().map(|r| r.width).sum();
        let check = Distinguisher {
            party,
            basis: gates::on_qubit(&gates::hadamard(), 0, w),
            accept: std::sync::Arc::new(|x: usize| x.count_ones() % 2 == 1),
        };
        let checked = with_distinguisher_round(&spec, check).unwrap();
        let step = 2;
        let mut stripped = Distribution::new();
        for (k, p) in first_round(&checked) {
            *stripped.entry(k[..t * step].to_string()).or_insert(0.0) += p;
        }
        let inner = first_round(&spec);
        assert_eq!(stripped.len(), inner.len(), "seed {seed}");
        for (k, p) in &inner {
            assert!((stripped[k] - p).abs() < 1e-10, "seed {seed} key {k}");
        }

        let (_, traces) = run(&checked, 3, &EngineOptions::default()).unwrap();
        assert!(entropy_trace_monotone(&traces).holds);
        if seed >= 4 {
            continue;
        }
        let out = impersonate(
            &checked,
            &AttackConfig::with_horizon(4).unwrap(),
            RoundChoice::Uniform,
            &AttackOptions::default(),
        )
        .unwrap();
        assert!(out.within_bound(), "seed {seed}: {} > {}", out.distance, out.bound);
        assert!(out.distance <= out.trace_bound + 1e-8);
    }
}

#[test]
fn basis_must_match_the_party() {
    let spec = custom("silent", 1, Silent);
    let wrong = Distinguisher::computational(Owner::Alice, 2, 0);
    assert!(with_distinguisher_round(&spec, wrong).is_err());
    let nobody = Distinguisher::computational(Owner::Environment, 1, 0);
    assert!(with_distinguisher_round(&spec, nobody).is_err());
}
