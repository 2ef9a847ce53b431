//! End-to-end pipeline, result documents, and independent re-validation.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bound::{self, DualCertificate, DualLpOutcome};
use crate::doubling::{self, DEFAULT_MEMO_CAP};
use crate::engine::{EngineConfig, EngineState, Verdict};
use crate::error::{Error, Result};
use crate::model::{EngineKind, Instance, ParsedInstance, VarSign, DEFAULT_RHS_CAP};
use crate::oracle::{self, DEFAULT_BUDGET};

/// `bound` value when the iteration count is backed by a dual certificate.
pub const BOUND_CERTIFIED: &str = "certified";
/// `bound` value when the iteration count came from the user alone.
pub const BOUND_HEURISTIC: &str = "heuristic — convergence not certified";

/// Knobs for [`solve`]. `None` fields fall back to the instance options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveConfig {
    pub engine: Option<EngineKind>,
    pub kbar: Option<u64>,
    /// Cap on brute-force enumeration and on the doubling memo.
    pub budget: u64,
    pub rhs_cap: u64,
    pub threads: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            engine: None,
            kbar: None,
            budget: DEFAULT_BUDGET.max(DEFAULT_MEMO_CAP),
            rhs_cap: DEFAULT_RHS_CAP,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub beta: Vec<i64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_feasible_k: Option<u64>,
    /// In the instance's own variables; free entries may be negative.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub feasible: usize,
    pub infeasible: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub beta: Vec<i64>,
    pub witness: Vec<i64>,
}

/// The document written by `solve` and `oracle`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub name: Option<String>,
    /// `"f"`, `"g"`, or `"oracle"`.
    pub engine: String,
    pub kbar: u64,
    pub kbar_certified: bool,
    pub bound: String,
    /// `k̄` implied by the dual certificate, when one verified.
    pub certified_kbar: Option<u64>,
    pub dual_cert: Option<Vec<String>>,
    /// `"user"`, `"lp"`, `"rejected"`, `"none"`, or `"unsupported-cone"`.
    pub dual_cert_source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<u32>,
    pub records: Vec<Record>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<Vec<PoolEntry>>,
    pub trace: Vec<String>,
    pub wall_ms: u64,
}

impl RunResult {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

fn summarize(records: &[Record]) -> Summary {
    let feasible = records.iter().filter(|r| r.verdict.is_feasible()).count();
    Summary { total: records.len(), feasible, infeasible: records.len() - feasible }
}

fn certificate_for(inst: &Instance, user: Option<&Vec<num_rational::BigRational>>) -> Result<(Option<DualCertificate>, &'static str)> {
    match user {
        Some(u) => Ok(match DualCertificate::new(inst, u.clone())? {
            Some(c) => (Some(c), "user"),
            None => (None, "rejected"),
        }),
        None => Ok(match bound::solve_dual_lp(inst)? {
            DualLpOutcome::Certificate(c) => (Some(c), "lp"),
            DualLpOutcome::NoCertificate => (None, "none"),
            DualLpOutcome::UnsupportedCone => (None, "unsupported-cone"),
        }),
    }
}

/// Parse output to result: split free variables, find `k̄`, run the chosen
/// engine, and fold witnesses back to the original variables.
///
/// The iteration count is the explicit override, else the instance's
/// `kbar` option, else the certified `k̄`. It counts as certified when a
/// dual certificate verified and the count is at least its `k̄`. The G
/// engine runs to `kmax = ⌈log₂ max(kbar, 1)⌉`.
pub fn solve(parsed: &ParsedInstance, cfg: &SolveConfig) -> Result<RunResult> {
    let start = Instant::now();
    let original = &parsed.instance;
    let inst = original.split_free_variables();
    let points = parsed.rhs.enumerate(cfg.rhs_cap)?;
    let engine = cfg.engine.or(parsed.options.engine).unwrap_or_default();

    let (cert, source) = certificate_for(&inst, parsed.options.dual_cert.as_ref())?;
    let certified_kbar = cert.as_ref().map(|c| bound::compute_kbar(c, &points)).transpose()?;
    let kbar = cfg
        .kbar
        .or(parsed.options.kbar)
        .or(certified_kbar)
        .ok_or(Error::NoCertifiedBound)?;
    let kbar_certified = certified_kbar.is_some_and(|c| kbar >= c);

    let (records, pool, trace, kmax) = match engine {
        EngineKind::F => {
            let state = EngineState::run_with(&inst, points, kbar, EngineConfig { threads: cfg.threads.max(1) })?;
            let cone = inst.cone();
            let table = state.table();
            let records: Vec<Record> = table
                .points()
                .iter()
                .enumerate()
                .map(|(i, beta)| Record {
                    beta: beta.clone(),
                    verdict: table.verdict(i),
                    first_feasible_k: table.first_feasible_k(i),
                    witness: state
                        .pool()
                        .dominating(cone, beta)
                        .map(|(_, x)| original.fold_split_witness(x)),
                })
                .collect();
            let pool = state
                .pool()
                .iter()
                .map(|(b, x)| PoolEntry { beta: b.clone(), witness: original.fold_split_witness(x) })
                .collect();
            let trace = state.trace().iter().map(ToString::to_string).collect();
            (records, Some(pool), trace, None)
        }
        EngineKind::G => {
            let kmax = doubling::kmax_for(kbar);
            let table = doubling::g_run(&inst, points, kmax, cfg.budget)?;
            let records: Vec<Record> = table
                .points()
                .iter()
                .enumerate()
                .map(|(i, beta)| Record {
                    beta: beta.clone(),
                    verdict: table.verdict(i),
                    first_feasible_k: table.first_feasible_k(i).map(u64::from),
                    witness: table.witness(i).map(|w| original.fold_split_witness(&w.x)),
                })
                .collect();
            let trace = table.trace().iter().map(ToString::to_string).collect();
            (records, None, trace, Some(kmax))
        }
    };

    let summary = summarize(&records);
    Ok(RunResult {
        name: original.name().map(str::to_owned),
        engine: engine.to_string(),
        kbar,
        kbar_certified,
        bound: if kbar_certified { BOUND_CERTIFIED } else { BOUND_HEURISTIC }.to_owned(),
        certified_kbar,
        dual_cert: cert.map(|c| c.to_strings()),
        dual_cert_source: source.to_owned(),
        kmax,
        records,
        summary,
        pool,
        trace,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// Brute-force verdicts `F₊^k` over `H`, in the same document shape as
/// [`solve`] but without a pool.
pub fn oracle_table(parsed: &ParsedInstance, k: u64, budget: u64, rhs_cap: u64) -> Result<RunResult> {
    let start = Instant::now();
    let original = &parsed.instance;
    let inst = original.split_free_variables();
    let points = parsed.rhs.enumerate(rhs_cap)?;
    let records = points
        .into_iter()
        .map(|beta| {
            let w = oracle::oracle_f(&inst, &beta, k, budget)?;
            Ok(Record {
                verdict: Verdict::from_feasible(w.is_some()),
                first_feasible_k: None,
                witness: w.map(|w| original.fold_split_witness(&w.x)),
                beta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&records);
    Ok(RunResult {
        name: original.name().map(str::to_owned),
        engine: "oracle".into(),
        kbar: k,
        kbar_certified: false,
        bound: "brute force".into(),
        certified_kbar: None,
        dual_cert: None,
        dual_cert_source: "none".into(),
        kmax: None,
        records,
        summary,
        pool: None,
        trace: Vec::new(),
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// Outcome of [`verify_result`]: one line per failed check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, failure: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(failure());
        }
    }
}

// Cardinality of the cheapest split representation of an original-variable x.
fn split_cardinality(original: &Instance, x: &[i64]) -> Option<u64> {
    if x.len() != original.n() {
        return None;
    }
    x.iter()
        .zip(original.var_signs())
        .map(|(&v, s)| match s {
            VarSign::Nonnegative if v < 0 => None,
            _ => Some(v.unsigned_abs()),
        })
        .sum()
}

/// Re-validates a result document against its instance, sharing no state
/// with the engines.
///
/// With a pool: the pool is an antichain; each element has a representation
/// `A x̄ = β̄` with `1ᵀx̄ <= kbar`; every column is dominated (when
/// `kbar >= 1`); feasible records are dominated and infeasible ones are not.
/// Without a pool, feasible records need a valid witness and infeasible
/// ones are re-decided by brute force.
pub fn verify_result(parsed: &ParsedInstance, result: &RunResult, budget: u64, rhs_cap: u64) -> Result<VerifyReport> {
    let original = &parsed.instance;
    let inst = original.split_free_variables();
    let cone = inst.cone();
    let mut report = VerifyReport::default();

    let expected: HashSet<Vec<i64>> = parsed.rhs.enumerate(rhs_cap)?.into_iter().collect();
    let listed: HashSet<Vec<i64>> = result.records.iter().map(|r| r.beta.clone()).collect();
    report.check(expected == listed && listed.len() == result.records.len(), || {
        "records do not list the instance's right-hand sides exactly once".into()
    });
    for r in &result.records {
        if r.beta.len() != inst.m() {
            report.check(false, || format!("record {:?} has the wrong dimension", r.beta));
            return Ok(report);
        }
    }

    for r in result.records.iter().filter(|r| r.verdict.is_feasible()) {
        if let Some(x) = &r.witness {
            let ok = split_cardinality(original, x).is_some() && cone.leq_unchecked(&original.apply_signed(x), &r.beta);
            report.check(ok, || format!("witness for {:?} does not satisfy A x ⪯ beta", r.beta));
        }
    }

    match &result.pool {
        Some(pool) => {
            for e in pool {
                if e.beta.len() != inst.m() {
                    report.check(false, || format!("pool element {:?} has the wrong dimension", e.beta));
                    return Ok(report);
                }
            }
            for (i, a) in pool.iter().enumerate() {
                for b in &pool[i + 1..] {
                    report.check(!cone.leq_unchecked(&a.beta, &b.beta) && !cone.leq_unchecked(&b.beta, &a.beta), || {
                        format!("pool elements {:?} and {:?} are comparable", a.beta, b.beta)
                    });
                }
            }
            for e in pool {
                let supplied = split_cardinality(original, &e.witness)
                    .is_some_and(|c| c <= result.kbar && original.apply_signed(&e.witness) == e.beta);
                let ok = supplied || oracle::exact_representation(&inst, &e.beta, result.kbar, budget)?.is_some();
                report.check(ok, || format!("pool element {:?} has no representation with 1ᵀx <= {}", e.beta, result.kbar));
            }
            let dominated = |beta: &[i64]| pool.iter().any(|e| cone.leq_unchecked(&e.beta, beta));
            if result.kbar >= 1 {
                for (j, a) in inst.columns().iter().enumerate() {
                    report.check(dominated(a), || format!("column {j} {a:?} is not dominated by the pool"));
                }
            }
            for r in &result.records {
                report.check(dominated(&r.beta) == r.verdict.is_feasible(), || {
                    format!("record {:?} is marked {} but the pool says otherwise", r.beta, r.verdict)
                });
            }
        }
        None => {
            for r in &result.records {
                if r.verdict.is_feasible() {
                    report.check(r.witness.is_some(), || format!("feasible record {:?} carries no witness", r.beta));
                } else {
                    let found = match result.engine.as_str() {
                        "g" => {
                            let k = result.kmax.ok_or_else(|| Error::invalid("kmax", "missing for engine g"))?;
                            oracle::oracle_g(&inst, &r.beta, k, budget)?.is_some()
                        }
                        _ => oracle::oracle_f(&inst, &r.beta, result.kbar, budget)?.is_some(),
                    };
                    report.check(!found, || format!("record {:?} is marked infeasible but a witness exists", r.beta));
                }
            }
        }
    }
    Ok(report)
}
