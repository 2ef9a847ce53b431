//! Exact phase-1 simplex over the rationals.
//!
//! Decides whether `{z >= 0 : P z = q}` is nonempty and returns a basic
//! feasible point when it is. Bland's rule guarantees termination.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Finds `z >= 0` with `P z = q`, or `None` when the system is infeasible.
///
/// `p` is row-major with `q.len()` rows; every row must have the same length.
pub fn find_nonnegative_solution(
    p: &[Vec<BigRational>],
    q: &[BigRational],
) -> Option<Vec<BigRational>> {
    assert_eq!(p.len(), q.len(), "row count mismatch");
    let rows = q.len();
    let vars = p.first().map_or(0, Vec::len);
    if rows == 0 {
        return Some(vec![BigRational::zero(); vars]);
    }
    let width = vars + rows + 1;
    let rhs = width - 1;

    // Rows are sign-normalized so the artificial basis starts feasible.
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(rows);
    for (i, (row, b)) in p.iter().zip(q).enumerate() {
        assert_eq!(row.len(), vars, "ragged constraint matrix");
        let flip = b.is_negative();
        let mut t = vec![BigRational::zero(); width];
        for (j, v) in row.iter().enumerate() {
            t[j] = if flip { -v.clone() } else { v.clone() };
        }
        t[vars + i] = BigRational::one();
        t[rhs] = if flip { -b.clone() } else { b.clone() };
        tab.push(t);
    }
    let mut basis: Vec<usize> = (vars..vars + rows).collect();

    // Reduced costs for minimizing the sum of artificials.
    let mut cost = vec![BigRational::zero(); width];
    for t in &tab {
        for j in 0..vars {
            cost[j] -= &t[j];
        }
        cost[rhs] -= &t[rhs];
    }

    while let Some(enter) = (0..vars + rows).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, t) in tab.iter().enumerate() {
            if !t[enter].is_positive() {
                continue;
            }
            let ratio = &t[rhs] / &t[enter];
            let better = match &leave {
                None => true,
                Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase 1 is bounded below by zero, so a leaving row always exists.
        let (pivot_row, _) = leave.expect("phase-1 objective is bounded");
        pivot(&mut tab, &mut cost, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    // The objective value is -cost[rhs].
    if !cost[rhs].is_zero() {
        return None;
    }
    let mut z = vec![BigRational::zero(); vars];
    for (i, &b) in basis.iter().enumerate() {
        if b < vars {
            z[b] = tab[i][rhs].clone();
        }
    }
    Some(z)
}

fn pivot(tab: &mut [Vec<BigRational>], cost: &mut [BigRational], row: usize, col: usize) {
    let width = cost.len();
    let inv = BigRational::one() / &tab[row][col];
    for v in tab[row].iter_mut() {
        *v *= &inv;
    }
    let pivot_row = tab[row].clone();
    for (i, t) in tab.iter_mut().enumerate() {
        if i == row || t[col].is_zero() {
            continue;
        }
        let factor = t[col].clone();
        for c in 0..width {
            t[c] -= &factor * &pivot_row[c];
        }
    }
    if !cost[col].is_zero() {
        let factor = cost[col].clone();
        for c in 0..width {
            cost[c] -= &factor * &pivot_row[c];
        }
    }
}
