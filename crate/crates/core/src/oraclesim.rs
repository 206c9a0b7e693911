//! Sampled classical oracles with logged, classical-only query access.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::bits;

/// Largest supported input width.
pub const MAX_INPUT_WIDTH: usize = 12;

/// Who issued a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    Mint,
    Verifier,
    Adversary,
}

/// A fully materialized random function `{0,1}^in → {0,1}^out`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleInstance {
    input_width: usize,
    output_width: usize,
    table: Vec<usize>,
}

impl OracleInstance {
    pub fn from_table(input_width: usize, output_width: usize, table: Vec<usize>) -> Result<Self> {
        if input_width > MAX_INPUT_WIDTH {
            return Err(Error::InvalidConfig(format!(
                "oracle input width {input_width} exceeds {MAX_INPUT_WIDTH}"
            )));
        }
        if table.len() != 1 << input_width || table.iter().any(|&y| y >> output_width != 0) {
            return Err(Error::InvalidConfig("oracle table does not match its widths".into()));
        }
        Ok(Self {
            input_width,
            output_width,
            table,
        })
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.output_width
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Unlogged lookup, for code that owns the oracle (the sampler, tests).
    pub fn lookup(&self, x: usize) -> Result<usize> {
        self.table.get(x).copied().ok_or_else(|| Error::OutOfDomain {
            input: format!("{x}"),
            width: self.input_width,
        })
    }
}

/// Uniformly random table, deterministic in `seed`.
pub fn sample_random_oracle(input_width: usize, output_width: usize, seed: u64) -> Result<OracleInstance> {
    if input_width > MAX_INPUT_WIDTH {
        return Err(Error::InvalidConfig(format!(
            "oracle input width {input_width} exceeds {MAX_INPUT_WIDTH}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = (0..1usize << input_width)
        .map(|_| rng.random_range(0..1usize << output_width))
        .collect();
    OracleInstance::from_table(input_width, output_width, table)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub party: Party,
    pub input: String,
    pub output: String,
}

/// Append-only record of oracle queries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryLog {
    entries: Vec<QueryRecord>,
}

impl QueryLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[QueryRecord] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Looks up `x` (a bit string of the oracle's input width) and logs the exchange.
pub fn classical_query(o: &OracleInstance, log: &mut QueryLog, party: Party, x: &str) -> Result<String> {
    let out_of_domain = || Error::OutOfDomain {
        input: x.to_string(),
        width: o.input_width,
    };
    if x.len() != o.input_width {
        return Err(out_of_domain());
    }
    let v = crate::qcore::parse_bits(x).ok_or_else(out_of_domain)?;
    let y = bits(o.lookup(v)?, o.output_width);
    log.entries.push(QueryRecord {
        party,
        input: x.to_string(),
        output: y.clone(),
    });
    Ok(y)
}
