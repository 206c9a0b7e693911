use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qimp::schemes::Family;
use qimp_harness::report::{read_records, report};
use qimp_harness::runner::{run_experiment, RunOptions};
use qimp_harness::selftest::{run_all, Scale};
use qimp_harness::sweep::sweep;
use qimp_harness::{corpus, exit, ExperimentConfig, HarnessError, SchemeConfig, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "qimp", version, about = "Exact impersonation experiments on small quantum protocols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and print its record.
    Run {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Write a one-record file here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
    },
    /// Run many experiments and write a record file plus a CSV table.
    Sweep {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// JSON array of experiment configs.
        #[arg(long, conflicts_with = "corpus")]
        config: Option<PathBuf>,
        /// Use the built-in corpus.
        #[arg(long)]
        corpus: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Record wall times (makes files differ between runs).
        #[arg(long)]
        timings: bool,
    },
    /// Summarize a record file and cross-check it.
    Report {
        records: PathBuf,
        /// Print the machine summary as JSON instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Run the invariant suite.
    Selftest {
        /// Use the full sizes instead of the quick ones.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeName {
    Random,
    EprAuth,
    Trigger,
    Alternating,
    ToyMoney,
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(long, value_enum)]
    scheme: Option<SchemeName>,
    /// Alice's qubits: X width, EPR pairs, key bits or note qubits.
    #[arg(long)]
    n: Option<usize>,
    /// Bob's qubits for random protocols.
    #[arg(long, default_value_t = 1)]
    y: usize,
    /// Messages per round for random protocols.
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value = "clifford")]
    family: Family,
    /// Verify toy-money notes against the scheme's own oracle.
    #[arg(long)]
    known_oracle: bool,
    /// Horizons; several give one experiment each in a sweep.
    #[arg(long = "K", value_delimiter = ',')]
    horizon: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Diagnostic: fix Eve's number of passive rounds.
    #[arg(long)]
    fixed_k: Option<usize>,
    #[arg(long)]
    qubit_cap: Option<usize>,
    #[arg(long)]
    branch_cap: Option<usize>,
    /// Also compute the hybrid ladder.
    #[arg(long)]
    ladder: bool,
}

impl SchemeArgs {
    fn configs(&self) -> Result<Vec<ExperimentConfig>, HarnessError> {
        let Some(name) = self.scheme else {
            return Ok(Vec::new());
        };
        let n = self
            .n
            .ok_or_else(|| HarnessError::Config("--n is required".into()))?;
        let scheme = match name {
            SchemeName::Random => SchemeConfig::Random {
                family: self.family,
                x_width: n,
                y_width: self.y,
                t: self.t,
            },
            SchemeName::EprAuth => SchemeConfig::EprAuth { pairs: n },
            SchemeName::Trigger => SchemeConfig::Trigger { n },
            SchemeName::Alternating => SchemeConfig::Alternating { n },
            SchemeName::ToyMoney => SchemeConfig::ToyMoney {
                note_qubits: n,
                known_oracle: self.known_oracle,
            },
        };
        let budgets: Vec<(Option<usize>, Option<f64>)> = match (self.horizon.is_empty(), self.epsilon.is_empty()) {
            (false, true) => self.horizon.iter().map(|&k| (Some(k), None)).collect(),
            (true, false) => self.epsilon.iter().map(|&e| (None, Some(e))).collect(),
            _ => return Err(HarnessError::Config("give exactly one of --K or --epsilon".into())),
        };
        Ok(budgets
            .into_iter()
            .map(|(k, e)| {
                let mut cfg = ExperimentConfig::new(scheme.clone(), k, e).with_seed(self.seed);
                cfg.fixed_k = self.fixed_k;
                cfg.ladder = self.ladder;
                if let Some(c) = self.qubit_cap {
                    cfg.qubit_cap = c;
                }
                if let Some(c) = self.branch_cap {
                    cfg.branch_cap = c;
                }
                cfg
            })
            .collect())
    }
}

fn default_out(name: &str) -> PathBuf {
    let dir = std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("qimp-out"), PathBuf::from);
    dir.join(name)
}

fn load_configs(path: &Path) -> Result<Vec<ExperimentConfig>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::CONFIG as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, HarnessError> {
    match cli.command {
        Command::Run { scheme, out, timings } => {
            let cfgs = scheme.configs()?;
            let [cfg] = cfgs.as_slice() else {
                return Err(HarnessError::Config("run takes --scheme, --n and a single --K or --epsilon".into()));
            };
            let opts = RunOptions { timings };
            let rec = match out {
                Some(path) => {
                    sweep(std::slice::from_ref(cfg), &path, 1, opts)?;
                    eprintln!("wrote {}", path.display());
                    read_records(&path)?.remove(0)
                }
                None => {
                    let rec = run_experiment(0, cfg, opts);
                    println!("{}", serde_json::to_string_pretty(&rec)?);
                    rec
                }
            };
            if let Some(e) = &rec.error {
                eprintln!("error: {e}");
                return Ok(exit::CONFIG);
            }
            Ok(if rec.theorem_failure() { exit::CHECK_FAILED } else { exit::OK })
        }
        Command::Sweep {
            scheme,
            config,
            corpus: use_corpus,
            out,
            workers,
            timings,
        } => {
            let mut cfgs = match (&config, use_corpus) {
                (Some(p), _) => load_configs(p)?,
                (None, true) => corpus::standard(),
                (None, false) => Vec::new(),
            };
            cfgs.extend(scheme.configs()?);
            let out = out.unwrap_or_else(|| default_out("records.jsonl"));
            let summary = sweep(&cfgs, &out, workers, RunOptions { timings })?;
            print!("{}", summary.render());
            eprintln!(
                "wrote {} and {}",
                summary.records_path.display(),
                summary.table_path.display()
            );
            Ok(if summary.theorem_failures() > 0 {
                exit::CHECK_FAILED
            } else if summary.errors() > 0 {
                exit::CONFIG
            } else {
                exit::OK
            })
        }
        Command::Report { records, json } => {
            let rep = report(&read_records(&records)?);
            if json {
                println!("{}", serde_json::to_string(&rep.summary)?);
            } else {
                print!("{}", rep.render());
                println!("{}", serde_json::to_string(&rep.summary)?);
            }
            Ok(if rep.failed() { exit::CHECK_FAILED } else { exit::OK })
        }
        Command::Selftest { full } => {
            let checks = run_all(if full { Scale::FULL } else { Scale::QUICK })?;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            Ok(if checks.iter().all(|c| c.passed) {
                exit::OK
            } else {
                exit::CHECK_FAILED
            })
        }
    }
}
