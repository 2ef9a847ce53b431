//! Nested construction of the cardinality-bounded feasibility functions.
//!
//! `F₊^k(β) = 0` iff some `x ∈ Z^n_+` with `1ᵀx <= k` satisfies `A x ⪯_K β`.
//! The engine never stores `F₊^k` over all of `Z^m`. It keeps the finite
//! antichain `B^k` of level-set-minimal right-hand sides instead:
//! `F₊^k(β) = 0` iff some element of `B^k` is `⪯_K β`. The verdict table over
//! `H` is a cache derived from the pool.
//!
//! Each [`EngineState::step`] moves from `k - 1` to `k` in two phases:
//!
//! 1. Build the candidate set `C^{k-1}` from `B^{k-1}` and its translates
//!    `B^{k-1} + a^j`, evaluate `F₊^k` on the candidates through the
//!    recursion `F₊^k(β) = max(F₊^{k-1}(β), max_j F₊^{k-1}(β - a^j))`, and
//!    keep the feasible ones as `B^k`.
//! 2. Evaluate every still-unsolved `β ∈ H` outside `C^{k-1}` against `B^k`.
//!
//! Within a phase evaluations only read the previous snapshot, so they may
//! run on a worker pool; results are merged at the phase boundary.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::ConeSpec;
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::oracle::{self, Witness};

/// Value of a feasibility function: `0` (feasible) or `-1` (infeasible).
///
/// Ordered so that `Infeasible < Feasible`, matching `-1 < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Infeasible,
    Feasible,
}

impl Verdict {
    pub fn from_feasible(feasible: bool) -> Self {
        if feasible {
            Verdict::Feasible
        } else {
            Verdict::Infeasible
        }
    }

    pub fn is_feasible(self) -> bool {
        self == Verdict::Feasible
    }

    /// `0` or `-1`.
    pub fn value(self) -> i8 {
        match self {
            Verdict::Feasible => 0,
            Verdict::Infeasible => -1,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
        })
    }
}

/// The antichain `B^k` together with a witness `x` for each element.
///
/// Every element `β̄` carries `x ∈ Z^n_+` with `A x = β̄` and `1ᵀx <= k`.
/// Elements are kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalPool {
    k: u64,
    elements: BTreeMap<Vec<i64>, Vec<u64>>,
}

impl MinimalPool {
    /// `B^0 = {0}`.
    pub fn initial(m: usize, n: usize) -> Self {
        let mut elements = BTreeMap::new();
        elements.insert(vec![0; m], vec![0; n]);
        MinimalPool { k: 0, elements }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, beta: &[i64]) -> bool {
        self.elements.contains_key(beta)
    }

    pub fn witness(&self, beta: &[i64]) -> Option<&[u64]> {
        self.elements.get(beta).map(Vec::as_slice)
    }

    pub fn elements(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.elements.keys()
    }

    /// Pairs of element and witness, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Vec<u64>)> {
        self.elements.iter()
    }

    /// The first element `β̄ ⪯_K β`, if any.
    pub fn dominating(&self, cone: &ConeSpec, beta: &[i64]) -> Option<(&Vec<i64>, &Vec<u64>)> {
        self.elements.iter().find(|(b, _)| cone.leq_unchecked(b, beta))
    }

    /// No two distinct elements are comparable.
    pub fn is_antichain(&self, cone: &ConeSpec) -> bool {
        let elems: Vec<&Vec<i64>> = self.elements.keys().collect();
        elems.iter().enumerate().all(|(i, a)| {
            elems
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !cone.leq_unchecked(a, b))
        })
    }
}

/// `F₊^k(β)` from the pool: feasible iff some `β̄ ∈ B^k` has `β̄ ⪯_K β`.
///
/// Valid at every integral `β`, not just points of `H`.
pub fn pool_feasible(pool: &MinimalPool, beta: &[i64], cone: &ConeSpec) -> Verdict {
    Verdict::from_feasible(pool.dominating(cone, beta).is_some())
}

/// Verdicts over `H`, keyed by position in the enumerated set.
#[derive(Debug, Clone)]
pub struct FeasTable {
    k: u64,
    points: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    // `Some(k)` iff the point is in the solved set S; k is its first feasible level.
    first_feasible: Vec<Option<u64>>,
}

impl FeasTable {
    fn new(points: Vec<Vec<i64>>) -> Self {
        let mut index = HashMap::with_capacity(points.len());
        let mut unique = Vec::with_capacity(points.len());
        for p in points {
            if !index.contains_key(&p) {
                index.insert(p.clone(), unique.len());
                unique.push(p);
            }
        }
        let first_feasible = vec![None; unique.len()];
        FeasTable { k: 0, points: unique, index, first_feasible }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn position(&self, beta: &[i64]) -> Option<usize> {
        self.index.get(beta).copied()
    }

    pub fn verdict(&self, i: usize) -> Verdict {
        Verdict::from_feasible(self.first_feasible[i].is_some())
    }

    pub fn verdict_of(&self, beta: &[i64]) -> Option<Verdict> {
        self.position(beta).map(|i| self.verdict(i))
    }

    /// Smallest `k` with `F₊^k(β) = 0`, or `None` while still infeasible.
    pub fn first_feasible_k(&self, i: usize) -> Option<u64> {
        self.first_feasible[i]
    }

    pub fn solved_count(&self) -> usize {
        self.first_feasible.iter().filter(|f| f.is_some()).count()
    }

    pub fn verdicts(&self) -> impl Iterator<Item = (&Vec<i64>, Verdict)> {
        self.points.iter().enumerate().map(|(i, p)| (p, self.verdict(i)))
    }

    fn is_solved(&self, beta: &[i64]) -> bool {
        self.position(beta).is_some_and(|i| self.first_feasible[i].is_some())
    }

    fn mark_solved(&mut self, i: usize, k: u64) {
        if self.first_feasible[i].is_none() {
            self.first_feasible[i] = Some(k);
        }
    }
}

/// Per-iteration statistics, printed as one trace line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationStats {
    pub k: u64,
    pub candidates: usize,
    pub pool: usize,
    pub solved: usize,
    pub total: usize,
    pub elapsed_ms: u64,
}

impl fmt::Display for IterationStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} |C|={} |B|={} solved={}/{} elapsed_ms={}",
            self.k, self.candidates, self.pool, self.solved, self.total, self.elapsed_ms
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Worker threads per phase; `1` runs sequentially.
    pub threads: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { threads: 1 }
    }
}

/// Instance, table and pool at a common level `k`.
pub struct EngineState {
    instance: Instance,
    // Distinct columns with the index of their first occurrence.
    columns: Vec<(usize, Vec<i64>)>,
    table: FeasTable,
    pool: MinimalPool,
    trace: Vec<IterationStats>,
    workers: Option<Arc<rayon::ThreadPool>>,
}

impl fmt::Debug for EngineState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EngineState")
            .field("k", &self.table.k)
            .field("pool", &self.pool.len())
            .field("solved", &self.table.solved_count())
            .field("total", &self.table.len())
            .finish()
    }
}

impl EngineState {
    /// `F₊^0(β) = 0` iff `β ∈ K`; `B^0 = {0}`.
    pub fn init(inst: &Instance, points: Vec<Vec<i64>>) -> Result<Self> {
        Self::init_with(inst, points, EngineConfig::default())
    }

    pub fn init_with(inst: &Instance, points: Vec<Vec<i64>>, config: EngineConfig) -> Result<Self> {
        if inst.has_free_variables() {
            return Err(Error::FreeVariables { operation: "running the engine" });
        }
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != inst.m()) {
            return Err(Error::dimension(format!("H[{i}]"), inst.m(), p.len()));
        }
        let mut seen = HashSet::new();
        let columns = inst
            .columns()
            .iter()
            .enumerate()
            .filter(|(_, c)| seen.insert((*c).clone()))
            .map(|(j, c)| (j, c.clone()))
            .collect();
        let workers = if config.threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.threads)
                .build()
                .map_err(|e| Error::invalid("threads", e.to_string()))?;
            Some(Arc::new(pool))
        } else {
            None
        };

        let start = Instant::now();
        let mut table = FeasTable::new(points);
        for i in 0..table.len() {
            if inst.cone().contains_unchecked(&table.points[i]) {
                table.mark_solved(i, 0);
            }
        }
        let pool = MinimalPool::initial(inst.m(), inst.n());
        let trace = vec![IterationStats {
            k: 0,
            candidates: 0,
            pool: pool.len(),
            solved: table.solved_count(),
            total: table.len(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        }];
        Ok(EngineState {
            instance: inst.clone(),
            columns,
            table,
            pool,
            trace,
            workers,
        })
    }

    /// Initializes and steps `kbar` times.
    pub fn run(inst: &Instance, points: Vec<Vec<i64>>, kbar: u64) -> Result<Self> {
        Self::run_with(inst, points, kbar, EngineConfig::default())
    }

    pub fn run_with(inst: &Instance, points: Vec<Vec<i64>>, kbar: u64, config: EngineConfig) -> Result<Self> {
        let mut state = Self::init_with(inst, points, config)?;
        for _ in 0..kbar {
            state.step();
        }
        Ok(state)
    }

    pub fn k(&self) -> u64 {
        self.table.k
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn table(&self) -> &FeasTable {
        &self.table
    }

    pub fn pool(&self) -> &MinimalPool {
        &self.pool
    }

    pub fn trace(&self) -> &[IterationStats] {
        &self.trace
    }

    fn cone(&self) -> &ConeSpec {
        self.instance.cone()
    }

    fn map_phase<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match &self.workers {
            Some(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            None => items.iter().map(f).collect(),
        }
    }

    fn feasible_now(&self, beta: &[i64]) -> bool {
        self.pool.dominating(self.cone(), beta).is_some()
    }

    /// `F₊^k(β)` at the current level for any integral `β`.
    pub fn feasible_at(&self, beta: &[i64]) -> Result<Verdict> {
        if beta.len() != self.instance.m() {
            return Err(Error::dimension("beta", self.instance.m(), beta.len()));
        }
        Ok(pool_feasible(&self.pool, beta, self.cone()))
    }

    /// `F₊^k` at a rational right-hand side, rounded down first. Only
    /// orthant-like cones support the rounding.
    pub fn feasible_at_rational(&self, beta: &[BigRational]) -> Result<Verdict> {
        let floored = self.cone().floor_to_integral(beta)?;
        self.feasible_at(&floored)
    }

    /// The candidate set `C^{k}` built from the current pool `B^k`.
    ///
    /// `β` from `B^k ∪ ⋃_j (B^k + a^j)` survives iff `F₊^k(β) = 0` implies
    /// `β ∈ B^k` and, for every column, `F₊^k(β - a^j) = 0` implies
    /// `β - a^j ∈ B^k`. Candidates need not lie in `H`.
    pub fn candidates(&self) -> Vec<Vec<i64>> {
        let mut raw: BTreeSet<Vec<i64>> = self.pool.elements().cloned().collect();
        for b in self.pool.elements() {
            for (_, a) in &self.columns {
                raw.insert(b.iter().zip(a).map(|(x, y)| x + y).collect());
            }
        }
        let raw: Vec<Vec<i64>> = raw.into_iter().collect();
        let keep = self.map_phase(&raw, |beta| {
            if self.feasible_now(beta) && !self.pool.contains(beta) {
                return false;
            }
            self.columns.iter().all(|(_, a)| {
                let shifted: Vec<i64> = beta.iter().zip(a).map(|(x, y)| x - y).collect();
                !self.feasible_now(&shifted) || self.pool.contains(&shifted)
            })
        });
        raw.into_iter().zip(keep).filter_map(|(b, k)| k.then_some(b)).collect()
    }

    /// `F₊^{k+1}(β)` for a candidate `β`, using only the current pool.
    pub fn eval_spec(&self, beta: &[i64]) -> Verdict {
        Verdict::from_feasible(self.eval_spec_witness(beta).is_some())
    }

    fn eval_spec_witness(&self, beta: &[i64]) -> Option<Vec<u64>> {
        let cone = self.cone();
        if let Some((_, w)) = self.pool.dominating(cone, beta) {
            return Some(w.clone());
        }
        for (j, a) in &self.columns {
            let shifted: Vec<i64> = beta.iter().zip(a).map(|(x, y)| x - y).collect();
            if let Some((_, w)) = self.pool.dominating(cone, &shifted) {
                let mut x = w.clone();
                x[*j] += 1;
                return Some(x);
            }
        }
        None
    }

    /// Advances from `k` to `k + 1`.
    pub fn step(&mut self) {
        let start = Instant::now();
        let next_k = self.table.k + 1;
        let candidates = self.candidates();

        // Phase 1: candidates give B^{k+1}. Solved points outside the pool
        // cannot be candidates, so every candidate is evaluated.
        let results = self.map_phase(&candidates, |beta| {
            if self.table.is_solved(beta) {
                self.pool.witness(beta).map(<[u64]>::to_vec)
            } else {
                self.eval_spec_witness(beta)
            }
        });
        let mut next_pool = BTreeMap::new();
        for (beta, witness) in candidates.iter().zip(results) {
            if let Some(x) = witness {
                if let Some(i) = self.table.position(beta) {
                    self.table.mark_solved(i, next_k);
                }
                next_pool.insert(beta.clone(), x);
            }
        }
        self.pool = MinimalPool { k: next_k, elements: next_pool };

        // Phase 2: remaining unsolved points of H against B^{k+1}.
        let candidate_set: HashSet<&Vec<i64>> = candidates.iter().collect();
        let pending: Vec<usize> = (0..self.table.len())
            .filter(|&i| self.table.first_feasible[i].is_none() && !candidate_set.contains(&self.table.points[i]))
            .collect();
        let results = self.map_phase(&pending, |&i| self.feasible_now(&self.table.points[i]));
        for (i, feasible) in pending.into_iter().zip(results) {
            if feasible {
                self.table.mark_solved(i, next_k);
            }
        }
        self.table.k = next_k;

        self.trace.push(IterationStats {
            k: next_k,
            candidates: candidates.len(),
            pool: self.pool.len(),
            solved: self.table.solved_count(),
            total: self.table.len(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        });
    }

    /// Decides which side of the theorem of the alternative holds for `β`
    /// at the current level.
    ///
    /// The feasible side is searched by brute force, independently of the
    /// pool; the infeasible side is the pool representation of `F₊^k` with
    /// `F₊^k(a^j) = 0` for every column and `F₊^k(β) = -1`. Exactly one side
    /// must validate.
    pub fn certificate_check(&self, beta: &[i64], budget: u64) -> Result<AlternativeVerdict> {
        if beta.len() != self.instance.m() {
            return Err(Error::dimension("beta", self.instance.m(), beta.len()));
        }
        let cone = self.cone();
        let search_k = self
            .table
            .position(beta)
            .and_then(|i| self.table.first_feasible_k(i))
            .unwrap_or(self.k());
        let witness = oracle::oracle_f(&self.instance, beta, search_k, budget)?
            .filter(|w| cone.leq_unchecked(&self.instance.apply(&w.x), beta));

        let infeasible = if self.feasible_now(beta) {
            None
        } else {
            self.instance
                .columns()
                .iter()
                .map(|a| self.pool.dominating(cone, a).map(|(b, _)| b.clone()))
                .collect::<Option<Vec<_>>>()
                .map(|column_dominators| InfeasibilityCertificate {
                    beta: beta.to_vec(),
                    pool: self.pool.clone(),
                    column_dominators,
                })
        };

        match (witness, infeasible) {
            (Some(witness), None) => Ok(AlternativeVerdict::Feasible { witness }),
            (None, Some(cert)) => Ok(AlternativeVerdict::Infeasible(cert)),
            (Some(_), Some(_)) => Err(Error::InconsistentState {
                beta: beta.to_vec(),
                detail: "both a witness and an infeasibility certificate validate".into(),
            }),
            (None, None) => Err(Error::InconsistentState {
                beta: beta.to_vec(),
                detail: "neither a witness nor an infeasibility certificate validates".into(),
            }),
        }
    }
}

/// Outcome of [`EngineState::certificate_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlternativeVerdict {
    Feasible { witness: Witness },
    Infeasible(InfeasibilityCertificate),
}

/// A member of `D₊(β)`: the finite pool representation of `F₊^k` together
/// with the facts `F₊^k(a^j) = 0` (via `column_dominators[j] ⪯_K a^j`) and
/// `F₊^k(β) = -1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub beta: Vec<i64>,
    pub pool: MinimalPool,
    pub column_dominators: Vec<Vec<i64>>,
}

impl InfeasibilityCertificate {
    /// Re-checks the certificate against `inst` from scratch.
    pub fn check(&self, inst: &Instance) -> bool {
        let cone = inst.cone();
        let k = self.pool.k();
        self.pool.is_antichain(cone)
            && self
                .pool
                .iter()
                .all(|(b, x)| x.len() == inst.n() && x.iter().sum::<u64>() <= k && inst.apply(x) == *b)
            && self.column_dominators.len() == inst.n()
            && self
                .column_dominators
                .iter()
                .zip(inst.columns())
                .all(|(d, a)| self.pool.contains(d) && cone.leq_unchecked(d, a))
            && self.pool.elements().all(|b| !cone.leq_unchecked(b, &self.beta))
    }
}
