//! The doubling sequence `G^k`: witnesses bounded componentwise by `2^k`.
//!
//! `G^0` enumerates `x ∈ {0,1}^n` directly. For `k >= 1`,
//! `G^k(β) = max_{y ∈ {0,1}^n} G^{k-1}(β - 2^{k-1} A y)`, evaluated top-down
//! with a memo keyed by `(k, β)`.

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engine::Verdict;
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::oracle::Witness;

/// Default cap on memo entries.
pub const DEFAULT_MEMO_CAP: u64 = 10_000_000;

/// `⌈log₂ max(k̄, 1)⌉`: the smallest `k` with `2^k >= k̄`.
pub fn kmax_for(kbar: u64) -> u32 {
    let k = kbar.max(1);
    64 - (k - 1).leading_zeros()
}

/// Cache of `G^k(β)` values.
#[derive(Debug, Clone)]
pub struct GMemo {
    cache: HashMap<(u32, Vec<i64>), Verdict>,
    cap: u64,
}

impl Default for GMemo {
    fn default() -> Self {
        GMemo::with_cap(DEFAULT_MEMO_CAP)
    }
}

impl GMemo {
    pub fn with_cap(cap: u64) -> Self {
        GMemo { cache: HashMap::new(), cap }
    }

    pub fn len(&self) -> usize {
        self.cache.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cache.is_empty()
    }

    pub fn get(&self, k: u32, beta: &[i64]) -> Option<Verdict> {
        self.cache.get(&(k, beta.to_vec())).copied()
    }

    fn insert(&mut self, k: u32, beta: Vec<i64>, v: Verdict) -> Result<()> {
        if self.cache.len() as u64 >= self.cap {
            return Err(Error::RecursionBudgetExceeded { budget: self.cap });
        }
        self.cache.insert((k, beta), v);
        Ok(())
    }
}

fn require_nonnegative(inst: &Instance) -> Result<()> {
    if inst.has_free_variables() {
        return Err(Error::FreeVariables { operation: "evaluating G^k" });
    }
    Ok(())
}

// The binary vector with bits of `mask`, highest-index variable as the low bit,
// so increasing masks visit y in increasing binary order.
fn bits(mask: u64, n: usize) -> impl Iterator<Item = (usize, bool)> {
    (0..n).map(move |j| (j, mask >> (n - 1 - j) & 1 == 1))
}

/// `G^0(β)`: some `x ∈ {0,1}^n` with `A x ⪯_K β`.
pub fn g_base(inst: &Instance, beta: &[i64]) -> Result<Verdict> {
    require_nonnegative(inst)?;
    if beta.len() != inst.m() {
        return Err(Error::dimension("beta", inst.m(), beta.len()));
    }
    let n = inst.n();
    if n >= 63 {
        return Err(Error::Overflow { context: "enumerating {0,1}^n" });
    }
    let cone = inst.cone();
    for mask in 0..1u64 << n {
        let x: Vec<u64> = bits(mask, n).map(|(_, b)| b as u64).collect();
        if cone.leq_unchecked(&inst.apply(&x), beta) {
            return Ok(Verdict::Feasible);
        }
    }
    Ok(Verdict::Infeasible)
}

/// `G^k(β)` through the memoized recursion, stopping at the first feasible
/// branch.
pub fn g_eval(inst: &Instance, memo: &mut GMemo, k: u32, beta: &[i64]) -> Result<Verdict> {
    require_nonnegative(inst)?;
    if beta.len() != inst.m() {
        return Err(Error::dimension("beta", inst.m(), beta.len()));
    }
    eval_rec(inst, memo, k, beta)
}

fn eval_rec(inst: &Instance, memo: &mut GMemo, k: u32, beta: &[i64]) -> Result<Verdict> {
    if let Some(v) = memo.get(k, beta) {
        return Ok(v);
    }
    let v = if k == 0 {
        g_base(inst, beta)?
    } else {
        let scale = 1i64
            .checked_shl(k - 1)
            .filter(|s| *s > 0)
            .ok_or(Error::Overflow { context: "computing 2^(k-1)" })?;
        let n = inst.n();
        let mut found = Verdict::Infeasible;
        for mask in 0..1u64 << n {
            let mut shifted = beta.to_vec();
            for (j, on) in bits(mask, n) {
                if !on {
                    continue;
                }
                for (s, &a) in shifted.iter_mut().zip(inst.column(j)) {
                    *s = a
                        .checked_mul(scale)
                        .and_then(|d| s.checked_sub(d))
                        .ok_or(Error::Overflow { context: "shifting beta by 2^(k-1) A y" })?;
                }
            }
            if eval_rec(inst, memo, k - 1, &shifted)?.is_feasible() {
                found = Verdict::Feasible;
                break;
            }
        }
        found
    };
    memo.insert(k, beta.to_vec(), v)?;
    Ok(v)
}

/// A witness `x <= 2^k` for `G^k(β) = 0`, rebuilt by following the
/// first feasible branch at every level.
pub fn g_witness(inst: &Instance, memo: &mut GMemo, k: u32, beta: &[i64]) -> Result<Option<Witness>> {
    if !g_eval(inst, memo, k, beta)?.is_feasible() {
        return Ok(None);
    }
    let n = inst.n();
    let cone = inst.cone();
    let mut x = vec![0u64; n];
    let mut cur = beta.to_vec();
    for level in (1..=k).rev() {
        let scale = 1i64 << (level - 1);
        let mut next = None;
        for mask in 0..1u64 << n {
            let mut shifted = cur.clone();
            for (j, on) in bits(mask, n) {
                if on {
                    for (s, &a) in shifted.iter_mut().zip(inst.column(j)) {
                        *s -= a * scale;
                    }
                }
            }
            if eval_rec(inst, memo, level - 1, &shifted)?.is_feasible() {
                for (j, on) in bits(mask, n) {
                    if on {
                        x[j] += scale as u64;
                    }
                }
                next = Some(shifted);
                break;
            }
        }
        cur = next.ok_or_else(|| Error::InconsistentState {
            beta: beta.to_vec(),
            detail: format!("memoized G^{level} is feasible but no branch is"),
        })?;
    }
    for mask in 0..1u64 << n {
        let y: Vec<u64> = bits(mask, n).map(|(_, b)| b as u64).collect();
        if cone.leq_unchecked(&inst.apply(&y), &cur) {
            for (xj, yj) in x.iter_mut().zip(y) {
                *xj += yj;
            }
            return Ok(Some(Witness { x }));
        }
    }
    Err(Error::InconsistentState {
        beta: beta.to_vec(),
        detail: "memoized G^0 is feasible but no binary vector is".into(),
    })
}

/// Per-level statistics of [`g_run`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GLevelStats {
    pub k: u32,
    pub memo: usize,
    pub solved: usize,
    pub total: usize,
    pub elapsed_ms: u64,
}

impl fmt::Display for GLevelStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} memo={} solved={}/{} elapsed_ms={}",
            self.k, self.memo, self.solved, self.total, self.elapsed_ms
        )
    }
}

/// `G^{kmax}` over `H`, with the first level at which each point turned
/// feasible.
#[derive(Debug, Clone)]
pub struct GTable {
    kmax: u32,
    points: Vec<Vec<i64>>,
    first_feasible: Vec<Option<u32>>,
    witnesses: Vec<Option<Witness>>,
    trace: Vec<GLevelStats>,
}

impl GTable {
    pub fn kmax(&self) -> u32 {
        self.kmax
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn verdict(&self, i: usize) -> Verdict {
        Verdict::from_feasible(self.first_feasible[i].is_some())
    }

    pub fn first_feasible_k(&self, i: usize) -> Option<u32> {
        self.first_feasible[i]
    }

    pub fn verdicts(&self) -> impl Iterator<Item = (&Vec<i64>, Verdict)> {
        self.points.iter().enumerate().map(|(i, p)| (p, self.verdict(i)))
    }

    pub fn solved_count(&self) -> usize {
        self.first_feasible.iter().filter(|f| f.is_some()).count()
    }

    /// Witness at the first feasible level.
    pub fn witness(&self, i: usize) -> Option<&Witness> {
        self.witnesses[i].as_ref()
    }

    pub fn trace(&self) -> &[GLevelStats] {
        &self.trace
    }
}

/// Evaluates `G^0, ..., G^{kmax}` on every point of `H`. Points already
/// feasible at a lower level are not re-evaluated, since `G^k` is
/// nondecreasing in `k`.
pub fn g_run(inst: &Instance, points: Vec<Vec<i64>>, kmax: u32, memo_cap: u64) -> Result<GTable> {
    require_nonnegative(inst)?;
    if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != inst.m()) {
        return Err(Error::dimension(format!("H[{i}]"), inst.m(), p.len()));
    }
    let mut memo = GMemo::with_cap(memo_cap);
    let mut first_feasible = vec![None; points.len()];
    let mut trace = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        let start = Instant::now();
        for (i, beta) in points.iter().enumerate() {
            if first_feasible[i].is_none() && eval_rec(inst, &mut memo, k, beta)?.is_feasible() {
                first_feasible[i] = Some(k);
            }
        }
        trace.push(GLevelStats {
            k,
            memo: memo.len(),
            solved: first_feasible.iter().filter(|f| f.is_some()).count(),
            total: points.len(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        });
    }
    let witnesses = points
        .iter()
        .zip(&first_feasible)
        .map(|(beta, k)| match k {
            Some(k) => g_witness(inst, &mut memo, *k, beta),
            None => Ok(None),
        })
        .collect::<Result<_>>()?;
    Ok(GTable { kmax, points, first_feasible, witnesses, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{ConeBlock, ConeSpec};
    use crate::model::RhsSet;
    use crate::oracle::{oracle_g, DEFAULT_BUDGET};

    fn i1() -> Instance {
        Instance::nonnegative(vec![vec![1], vec![-1]], ConeSpec::orthant(2).unwrap()).unwrap()
    }

    fn i2() -> Instance {
        Instance::nonnegative(
            vec![vec![1], vec![-3]],
            ConeSpec::new(vec![ConeBlock::second_order(2).unwrap()]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn base_examples() {
        assert_eq!(g_base(&i1(), &[1, -1]).unwrap(), Verdict::Feasible);
        assert_eq!(g_base(&i1(), &[0, -1]).unwrap(), Verdict::Infeasible);
        assert_eq!(g_base(&i2(), &[0, 0]).unwrap(), Verdict::Feasible);
    }

    #[test]
    fn eval_examples() {
        let mut memo = GMemo::default();
        assert_eq!(g_eval(&i1(), &mut memo, 2, &[5, -3]).unwrap(), Verdict::Feasible);
        assert_eq!(g_eval(&i1(), &mut memo, 1, &[5, -3]).unwrap(), Verdict::Infeasible);
        assert_eq!(g_eval(&i2(), &mut memo, 4, &[0, 0]).unwrap(), Verdict::Feasible);
    }

    #[test]
    fn eval_matches_direct_definition() {
        let inst = Instance::nonnegative(vec![vec![2, -1], vec![-1, 3]], ConeSpec::orthant(2).unwrap()).unwrap();
        let mut memo = GMemo::default();
        for k in 0..=3 {
            for b0 in -6..=6 {
                for b1 in -6..=6 {
                    let beta = [b0, b1];
                    let direct = oracle_g(&inst, &beta, k, DEFAULT_BUDGET).unwrap().is_some();
                    assert_eq!(g_eval(&inst, &mut memo, k, &beta).unwrap().is_feasible(), direct, "k={k} {beta:?}");
                }
            }
        }
    }

    #[test]
    fn run_examples() {
        let h = RhsSet::new_box(vec![0, -5], vec![5, 0]).unwrap().enumerate(100).unwrap();
        let t = g_run(&i1(), h.clone(), kmax_for(5), DEFAULT_MEMO_CAP).unwrap();
        assert_eq!(t.kmax(), 3);
        for (beta, v) in t.verdicts() {
            assert_eq!(v.is_feasible(), beta[0] >= 0 && beta[0] + beta[1] >= 0, "{beta:?}");
        }
        let t0 = g_run(&i1(), h, 0, DEFAULT_MEMO_CAP).unwrap();
        for (beta, v) in t0.verdicts() {
            let binary = beta.iter().all(|&b| b >= 0) || (beta[0] >= 1 && beta[1] >= -1);
            assert_eq!(v.is_feasible(), binary, "{beta:?}");
        }
        let t2 = g_run(&i2(), vec![vec![4, -5]], 2, DEFAULT_MEMO_CAP).unwrap();
        assert_eq!(t2.verdict(0), Verdict::Feasible);
        assert_eq!(t2.first_feasible_k(0), Some(2));
        assert_eq!(t2.witness(0).unwrap().x, vec![3]);
    }

    #[test]
    fn kmax_rounding() {
        assert_eq!(kmax_for(0), 0);
        assert_eq!(kmax_for(1), 0);
        assert_eq!(kmax_for(2), 1);
        assert_eq!(kmax_for(5), 3);
        assert_eq!(kmax_for(8), 3);
        assert_eq!(kmax_for(9), 4);
    }

    #[test]
    fn memo_cap_is_enforced() {
        let mut memo = GMemo::with_cap(3);
        let err = g_eval(&i1(), &mut memo, 6, &[-40, 40]).unwrap_err();
        assert!(matches!(err, Error::RecursionBudgetExceeded { budget: 3 }));
    }

    #[test]
    fn binary_level_is_not_superadditive() {
        // G^0 on a single column: (1,-1) is feasible with x = 1, but twice
        // that needs x = 2. Superadditivity only holds in the limit.
        let mut memo = GMemo::default();
        assert!(g_eval(&i1(), &mut memo, 0, &[1, -1]).unwrap().is_feasible());
        assert!(!g_eval(&i1(), &mut memo, 0, &[2, -2]).unwrap().is_feasible());
    }
}
