//! Small exact-arithmetic helpers shared by the cone and bound modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub(crate) fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Rank of a dense matrix over the rationals, by Gaussian elimination.
pub(crate) fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[rank][col];
            for c in col..cols {
                let delta = &factor * &m[rank][c];
                m[r][c] -= delta;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Exact PSD test for a symmetric rational matrix.
///
/// Symmetric elimination: a negative pivot rejects; a zero pivot requires the
/// rest of its row to be zero (the column follows by symmetry) and is then
/// skipped.
pub(crate) fn is_psd(mut m: Vec<Vec<BigRational>>) -> bool {
    let d = m.len();
    for i in 0..d {
        let pivot = m[i][i].clone();
        if pivot.is_negative() {
            return false;
        }
        if pivot.is_zero() {
            if (i + 1..d).any(|j| !m[i][j].is_zero()) {
                return false;
            }
            continue;
        }
        for r in i + 1..d {
            if m[r][i].is_zero() {
                continue;
            }
            let factor = &m[r][i] / &pivot;
            for c in i + 1..d {
                let delta = &factor * &m[i][c];
                m[r][c] -= delta;
            }
        }
    }
    true
}

/// Unpacks an upper-triangular row-major vector into a symmetric matrix.
pub(crate) fn unpack_symmetric<T: Clone>(packed: &[T], d: usize) -> Vec<Vec<T>> {
    debug_assert_eq!(packed.len(), d * (d + 1) / 2);
    let mut out: Vec<Vec<Option<T>>> = vec![vec![None; d]; d];
    let mut idx = 0;
    for i in 0..d {
        for j in i..d {
            out[i][j] = Some(packed[idx].clone());
            out[j][i] = Some(packed[idx].clone());
            idx += 1;
        }
    }
    out.into_iter()
        .map(|row| row.into_iter().map(|v| v.expect("filled")).collect())
        .collect()
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `-p` or `p/q` with a nonzero denominator.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}
