//! Feasibility functions of conic integer programs over a finite set of
//! integral right-hand sides.
//!
//! For `A ∈ Z^{m×n}` and a pointed cone `K`, the feasibility function
//! `F₊(β)` is `0` when some `x ∈ Z^n_+` has `A x ⪯_K β` and `-1` otherwise.
//! [`engine`] builds the cardinality-bounded approximations `F₊^k` through
//! pools of level-set-minimal right-hand sides, [`doubling`] runs the
//! componentwise-bounded alternative, [`bound`] certifies when to stop, and
//! [`oracle`] brute-forces everything for testing.
//!
//! ```
//! use conic_feas::{ConeSpec, EngineState, Instance, RhsSet};
//!
//! let inst = Instance::nonnegative(vec![vec![1], vec![-1]], ConeSpec::orthant(2)?)?;
//! let h = RhsSet::new_box(vec![0, -5], vec![5, 0])?.enumerate(1000)?;
//! let state = EngineState::run(&inst, h, 5)?;
//! assert_eq!(state.table().solved_count(), 21);
//! # Ok::<(), conic_feas::Error>(())
//! ```

pub mod bound;
pub mod cone;
pub mod doubling;
pub mod engine;
pub mod error;
mod exact;
pub mod model;
pub mod oracle;
pub mod report;

pub use bound::{compute_kbar, solve_dual_lp, verify_certificate, DualCertificate, DualLpOutcome};
pub use cone::{ConeBlock, ConeSpec};
pub use doubling::{g_eval, g_run, g_witness, GMemo, GTable};
pub use engine::{
    pool_feasible, AlternativeVerdict, EngineConfig, EngineState, FeasTable, InfeasibilityCertificate, MinimalPool,
    Verdict,
};
pub use error::{Error, Result};
pub use exact::{format_rational, parse_rational};
pub use model::{parse_instance, EngineKind, Instance, ParsedInstance, RhsSet, VarSign};
pub use oracle::{oracle_bk, oracle_f, oracle_g, Witness};
pub use report::{oracle_table, solve, verify_result, RunResult, SolveConfig, VerifyReport};
