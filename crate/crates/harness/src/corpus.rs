use qimp::schemes::Family;

use crate::config::{ExperimentConfig, SchemeConfig};

fn random(family: Family, x: usize, y: usize, t: usize, horizon: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig::new(
        SchemeConfig::Random {
            family,
            x_width: x,
            y_width: y,
            t,
        },
        Some(horizon),
        None,
    )
    .with_seed(seed)
}

fn money(note_qubits: usize, known_oracle: bool, horizon: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig::new(
        SchemeConfig::ToyMoney {
            note_qubits,
            known_oracle,
        },
        Some(horizon),
        None,
    )
    .with_seed(seed)
}

/// The standard sweep: small random protocols and every built-in scheme, `t ∈ {1,2}`, `K ∈ {8,16,32,64}`.
pub fn standard() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for (i, (x, y, t, k)) in [
        (1, 1, 1, 8),
        (1, 2, 1, 16),
        (2, 1, 1, 32),
        (1, 1, 2, 8),
        (2, 1, 2, 16),
        (1, 1, 1, 64),
        (2, 2, 1, 8),
    ]
    .into_iter()
    .enumerate()
    {
        out.push(random(Family::Clifford, x, y, t, k, 100 + i as u64));
    }
    for seed in 0..3 {
        out.push(random(Family::Haar, 1, 1, 1, 8, seed));
    }
    for k in [8, 16, 32, 64] {
        out.push(ExperimentConfig::new(SchemeConfig::EprAuth { pairs: 2 }, Some(k), None));
    }
    out.push(ExperimentConfig::new(SchemeConfig::EprAuth { pairs: 2 }, None, Some(0.5)));
    out.push(ExperimentConfig::new(SchemeConfig::Trigger { n: 3 }, Some(8), None));
    out.push(ExperimentConfig::new(SchemeConfig::Trigger { n: 4 }, Some(16), None));
    out.push(ExperimentConfig::new(SchemeConfig::Alternating { n: 2 }, Some(16), None));
    out.push(money(1, false, 8, 5));
    out.push(money(1, false, 32, 5));
    out.push(money(2, false, 16, 6));
    out.push(money(1, true, 16, 5));
    out
}
