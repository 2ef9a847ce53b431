//! Brute-force ground truth.
//!
//! Every function here enumerates lattice points directly from the
//! definitions. They are slow on purpose and share nothing with the engines
//! beyond the cone membership test.

use crate::error::{Error, Result};
use crate::model::Instance;

/// Default enumeration budget.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A nonnegative integer `x` with `A x ⪯_K β` for the queried `β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Witness {
    pub x: Vec<u64>,
}

impl Witness {
    pub fn cardinality(&self) -> u64 {
        self.x.iter().sum()
    }
}

fn require_nonnegative(inst: &Instance) -> Result<()> {
    if inst.has_free_variables() {
        return Err(Error::FreeVariables { operation: "brute-force enumeration" });
    }
    Ok(())
}

fn check_beta(inst: &Instance, beta: &[i64]) -> Result<()> {
    if beta.len() != inst.m() {
        return Err(Error::dimension("beta", inst.m(), beta.len()));
    }
    Ok(())
}

/// `C(k + n, n)`, saturating.
pub fn simplex_point_count(n: usize, k: u64) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=n as u128 {
        acc = acc.saturating_mul(k as u128 + i) / i;
    }
    acc
}

/// Calls `f` on every `x ∈ Z^n_+` with `1ᵀx <= k`, lexicographically, until
/// `f` returns `true`.
fn for_each_bounded_sum(n: usize, k: u64, mut f: impl FnMut(&[u64]) -> bool) -> bool {
    fn rec(x: &mut Vec<u64>, i: usize, left: u64, f: &mut dyn FnMut(&[u64]) -> bool) -> bool {
        if i == x.len() {
            return f(x);
        }
        for v in 0..=left {
            x[i] = v;
            if rec(x, i + 1, left - v, f) {
                return true;
            }
        }
        x[i] = 0;
        false
    }
    let mut x = vec![0u64; n];
    rec(&mut x, 0, k, &mut f)
}

/// Calls `f` on every `x ∈ {0..=bound}^n`, lexicographically, until `f`
/// returns `true`.
fn for_each_in_box(n: usize, bound: u64, mut f: impl FnMut(&[u64]) -> bool) -> bool {
    let mut x = vec![0u64; n];
    loop {
        if f(&x) {
            return true;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if x[i] < bound {
                x[i] += 1;
                break;
            }
            x[i] = 0;
        }
    }
}

/// `F₊^k(β)`: searches `x ∈ Z^n_+` with `1ᵀx <= k`. Returns the
/// lexicographically first witness, or `None` when `F₊^k(β) = -1`.
pub fn oracle_f(inst: &Instance, beta: &[i64], k: u64, budget: u64) -> Result<Option<Witness>> {
    require_nonnegative(inst)?;
    check_beta(inst, beta)?;
    let needed = simplex_point_count(inst.n(), k);
    if needed > budget as u128 {
        return Err(Error::EnumerationBudget { needed, budget });
    }
    let cone = inst.cone();
    let mut found = None;
    for_each_bounded_sum(inst.n(), k, |x| {
        if cone.leq_unchecked(&inst.apply(x), beta) {
            found = Some(Witness { x: x.to_vec() });
            true
        } else {
            false
        }
    });
    Ok(found)
}

/// `G^k(β)`: searches `x ∈ {0, ..., 2^k}^n`.
pub fn oracle_g(inst: &Instance, beta: &[i64], k: u32, budget: u64) -> Result<Option<Witness>> {
    require_nonnegative(inst)?;
    check_beta(inst, beta)?;
    let bound = 1u64
        .checked_shl(k)
        .filter(|b| *b <= 1 << 40)
        .ok_or(Error::Overflow { context: "computing 2^k" })?;
    let needed = (bound as u128 + 1).saturating_pow(inst.n() as u32);
    if needed > budget as u128 {
        return Err(Error::EnumerationBudget { needed, budget });
    }
    let cone = inst.cone();
    let mut found = None;
    for_each_in_box(inst.n(), bound, |x| {
        if cone.leq_unchecked(&inst.apply(x), beta) {
            found = Some(Witness { x: x.to_vec() });
            true
        } else {
            false
        }
    });
    Ok(found)
}

/// Level-set-minimal membership at level `k`: `F₊^k(β) = 0` and every
/// feasible `x` with `1ᵀx <= k` has `A x = β`.
pub fn oracle_bk(inst: &Instance, beta: &[i64], k: u64, budget: u64) -> Result<bool> {
    require_nonnegative(inst)?;
    check_beta(inst, beta)?;
    let needed = simplex_point_count(inst.n(), k);
    if needed > budget as u128 {
        return Err(Error::EnumerationBudget { needed, budget });
    }
    let cone = inst.cone();
    let mut any = false;
    let violated = for_each_bounded_sum(inst.n(), k, |x| {
        let ax = inst.apply(x);
        if cone.leq_unchecked(&ax, beta) {
            any = true;
            ax != beta
        } else {
            false
        }
    });
    Ok(any && !violated)
}

/// Searches `x ∈ Z^n_+` with `1ᵀx <= k` and `A x = β` exactly.
pub fn exact_representation(inst: &Instance, beta: &[i64], k: u64, budget: u64) -> Result<Option<Witness>> {
    require_nonnegative(inst)?;
    check_beta(inst, beta)?;
    let needed = simplex_point_count(inst.n(), k);
    if needed > budget as u128 {
        return Err(Error::EnumerationBudget { needed, budget });
    }
    let mut found = None;
    for_each_bounded_sum(inst.n(), k, |x| {
        if inst.apply(x) == beta {
            found = Some(Witness { x: x.to_vec() });
            true
        } else {
            false
        }
    });
    Ok(found)
}
