use serde::{Deserialize, Serialize};

use qimp::attack::required_rounds;
use qimp::protocol::{EngineOptions, ProtocolSpec};
use qimp::qcore::DEFAULT_QUBIT_CAP;
use qimp::schemes::{alternating_basis, epr_auth, random_protocol, trigger_protocol, Family, RandomProtocolConfig, ToyMoneyScheme};

use crate::error::{HarnessError, Result};

/// A scheme and its structural parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum SchemeConfig {
    Random {
        family: Family,
        x_width: usize,
        y_width: usize,
        t: usize,
    },
    EprAuth {
        pairs: usize,
    },
    Trigger {
        n: usize,
    },
    Alternating {
        n: usize,
    },
    ToyMoney {
        note_qubits: usize,
        #[serde(default)]
        known_oracle: bool,
    },
}

impl SchemeConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Random { .. } => "random",
            Self::EprAuth { .. } => "epr-auth",
            Self::Trigger { .. } => "trigger",
            Self::Alternating { .. } => "alternating",
            Self::ToyMoney { .. } => "toy-money",
        }
    }

    /// Alice's qubit count and messages per round, known before the spec is built.
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            Self::Random { x_width, t, .. } => (x_width, t),
            Self::EprAuth { pairs } => (pairs, 1),
            Self::Trigger { n } | Self::Alternating { n } => (n, 1),
            Self::ToyMoney { note_qubits, .. } => (note_qubits, note_qubits + 1),
        }
    }
}

/// One experiment: a scheme, a horizon (given or derived from a target distance) and caps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub scheme: SchemeConfig,
    #[serde(rename = "K")]
    pub horizon: Option<usize>,
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub fixed_k: Option<usize>,
    #[serde(default = "default_qubit_cap")]
    pub qubit_cap: usize,
    #[serde(default = "default_branch_cap")]
    pub branch_cap: usize,
    #[serde(default)]
    pub ladder: bool,
}

fn default_qubit_cap() -> usize {
    DEFAULT_QUBIT_CAP
}

fn default_branch_cap() -> usize {
    EngineOptions::default().branch_cap
}

impl ExperimentConfig {
    pub fn new(scheme: SchemeConfig, horizon: Option<usize>, epsilon: Option<f64>) -> Self {
        Self {
            scheme,
            horizon,
            epsilon,
            seed: 0,
            fixed_k: None,
            qubit_cap: default_qubit_cap(),
            branch_cap: default_branch_cap(),
            ladder: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// `K`, given directly or as `⌈2nt/(ε² ln 2)⌉`.
    pub fn resolve_horizon(&self) -> Result<usize> {
        match (self.horizon, self.epsilon) {
            (Some(_), Some(_)) => Err(HarnessError::Config("give either K or epsilon, not both".into())),
            (None, None) => Err(HarnessError::Config("one of K or epsilon is required".into())),
            (Some(0), None) => Err(HarnessError::Config("K must be at least 1".into())),
            (Some(k), None) => Ok(k),
            (None, Some(eps)) => {
                let (n, t) = self.scheme.shape();
                Ok(required_rounds(n, t, eps)?)
            }
        }
    }

    pub fn engine(&self) -> EngineOptions {
        EngineOptions {
            branch_cap: self.branch_cap,
            ..EngineOptions::default()
        }
    }

    /// Builds the protocol for horizon `horizon` under this config's qubit cap.
    pub fn build(&self, horizon: usize) -> Result<ProtocolSpec> {
        let spec = match self.scheme {
            SchemeConfig::Random {
                family,
                x_width,
                y_width,
                t,
            } => random_protocol(RandomProtocolConfig {
                family,
                x_width,
                y_width,
                t,
                seed: self.seed,
            })?,
            SchemeConfig::EprAuth { pairs } => epr_auth(pairs, 1)?.spec,
            SchemeConfig::Trigger { n } => trigger_protocol(n, horizon)?,
            SchemeConfig::Alternating { n } => alternating_basis(n)?,
            SchemeConfig::ToyMoney {
                note_qubits,
                known_oracle,
            } => {
                let scheme = ToyMoneyScheme::new(note_qubits, self.seed)?;
                if known_oracle {
                    scheme.spec_with_known_oracle()?
                } else {
                    scheme.spec()?
                }
            }
        };
        if spec.qubit_cap() == self.qubit_cap {
            Ok(spec)
        } else {
            Ok(spec.with_qubit_cap(self.qubit_cap)?)
        }
    }
}
