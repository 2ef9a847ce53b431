//! `conic-feas`: solve, brute-force, and re-verify feasibility tables.
//!
//! Exit codes: 0 success, 2 unreadable or invalid input, 3 no certified
//! bound and no `--kbar`, 4 a size or enumeration budget was exceeded,
//! 5 verification failed. Internal inconsistencies exit with 1.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use conic_feas::model::DEFAULT_RHS_CAP;
use conic_feas::oracle::DEFAULT_BUDGET;
use conic_feas::{parse_instance, EngineKind, Error, ParsedInstance, RunResult, SolveConfig};

#[derive(Parser)]
#[command(name = "conic-feas", version, about = "Feasibility tables for conic integer programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    F,
    G,
}

#[derive(Subcommand)]
enum Command {
    /// Run an engine over the instance's right-hand sides and print the result JSON.
    Solve {
        path: PathBuf,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// Iteration count; overrides the certified bound.
        #[arg(long)]
        kbar: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print one trace line per iteration to stderr.
        #[arg(long)]
        trace: bool,
        /// Cap on the doubling memo.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Worker threads per engine phase.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Brute-force verdicts at a fixed cardinality bound.
    Oracle {
        path: PathBuf,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cap on enumerated lattice points per right-hand side.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Re-validate a result JSON against its instance.
    Verify {
        path: PathBuf,
        result: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

enum Failure {
    Input(String),
    Lib(Error),
    Verify(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoCertifiedBound => 3,
        Error::RhsCapExceeded { .. }
        | Error::EnumerationBudget { .. }
        | Error::RecursionBudgetExceeded { .. }
        | Error::Overflow { .. } => 4,
        Error::InconsistentState { .. } => 1,
        _ => 2,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ParsedInstance, Failure> {
    parse_instance(&read(path)?).map_err(|e| match e {
        Error::RhsCapExceeded { .. } => Failure::Lib(e),
        other => Failure::Input(format!("{}: {other}", path.display())),
    })
}

fn emit(result: &RunResult, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = result.to_json_pretty();
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { path, engine, kbar, out, trace, budget, threads } => {
            let parsed = load(&path)?;
            let cfg = SolveConfig {
                engine: engine.map(|e| match e {
                    EngineArg::F => EngineKind::F,
                    EngineArg::G => EngineKind::G,
                }),
                kbar,
                budget,
                rhs_cap: DEFAULT_RHS_CAP,
                threads,
            };
            let result = conic_feas::solve(&parsed, &cfg)?;
            if trace {
                for line in &result.trace {
                    eprintln!("{line}");
                }
            }
            emit(&result, out.as_deref())
        }
        Command::Oracle { path, k, out, budget } => {
            let parsed = load(&path)?;
            let result = conic_feas::oracle_table(&parsed, k, budget, DEFAULT_RHS_CAP)?;
            emit(&result, out.as_deref())
        }
        Command::Verify { path, result, budget } => {
            let parsed = load(&path)?;
            let doc: RunResult = serde_json::from_str(&read(&result)?)
                .map_err(|e| Failure::Input(format!("{}: {e}", result.display())))?;
            let report = conic_feas::verify_result(&parsed, &doc, budget, DEFAULT_RHS_CAP)?;
            if report.passed() {
                println!("pass: {} checks", report.checks);
                Ok(())
            } else {
                Err(Failure::Verify(report.failures))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Verify(failures)) => {
            println!("fail: {} checks failed", failures.len());
            for f in &failures {
                println!("  {f}");
            }
            ExitCode::from(5)
        }
    }
}
