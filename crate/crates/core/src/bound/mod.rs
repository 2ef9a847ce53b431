//! Certified stopping iteration from a dual certificate.
//!
//! If `u ∈ K*` and `Aᵀu >= 1`, every feasible `x` for `β` satisfies
//! `1ᵀx <= uᵀAx <= uᵀβ`, so iterating to `k̄ = ⌈max_{β∈H} uᵀβ⌉` already
//! decides every `β ∈ H`.

pub mod lp;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cone::ConeBlock;
use crate::error::{Error, Result};
use crate::exact::{self, rat};
use crate::model::Instance;

/// A rational `u` with `u ∈ K*` and `Aᵀu >= 1`, checked on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    u: Vec<BigRational>,
}

impl DualCertificate {
    /// Returns `Ok(None)` when `u` fails either condition.
    pub fn new(inst: &Instance, u: Vec<BigRational>) -> Result<Option<Self>> {
        Ok(verify_certificate(inst, &u)?.then_some(DualCertificate { u }))
    }

    pub fn u(&self) -> &[BigRational] {
        &self.u
    }

    /// Entries as `p` or `p/q` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.u.iter().map(exact::format_rational).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualLpOutcome {
    Certificate(DualCertificate),
    NoCertificate,
    /// Some block is second-order or PSD; the caller must supply `u`.
    UnsupportedCone,
}

/// Exact check of `u ∈ K*` and `Aᵀu >= 1`.
pub fn verify_certificate(inst: &Instance, u: &[BigRational]) -> Result<bool> {
    if !inst.cone().dual_contains(u)? {
        return Ok(false);
    }
    Ok(inst.columns().iter().all(|col| {
        let dot = col.iter().zip(u).fold(BigRational::zero(), |acc, (&a, ui)| acc + rat(a) * ui);
        dot >= BigRational::one()
    }))
}

/// `max(0, ⌈max_{β∈H} uᵀβ⌉)`; zero for empty `H`.
///
/// The clamp is exact: if every `uᵀβ < 0` then `1ᵀx <= uᵀβ < 0` has no
/// nonnegative solution, so `k̄ = 0` already certifies every point.
pub fn compute_kbar(cert: &DualCertificate, points: &[Vec<i64>]) -> Result<u64> {
    let best = points
        .iter()
        .map(|beta| {
            beta.iter()
                .zip(cert.u())
                .fold(BigRational::zero(), |acc, (&b, ui)| acc + rat(b) * ui)
        })
        .max();
    let Some(best) = best else { return Ok(0) };
    if !best.is_positive() {
        return Ok(0);
    }
    let ceil: BigInt = best.numer().div_ceil(best.denom());
    ceil.to_u64().ok_or(Error::Overflow { context: "computing kbar" })
}

/// Searches `{u ∈ K*, Aᵀu >= 1}` exactly when `K` is polyhedral.
///
/// Orthant parts of `u` are nonnegative variables; a polyhedral block
/// `{v : M v >= 0}` contributes `u_b = Mᵀλ` with `λ >= 0`. Phase-1 simplex
/// with Bland's rule then solves `Aᵀu - s = 1` over all nonnegative variables.
pub fn solve_dual_lp(inst: &Instance) -> Result<DualLpOutcome> {
    if !inst.cone().is_polyhedral() {
        return Ok(DualLpOutcome::UnsupportedCone);
    }
    let m = inst.m();
    let n = inst.n();

    // u = T z_u, where z_u stacks orthant coordinates and lambdas.
    let mut transform: Vec<Vec<BigRational>> = vec![Vec::new(); m];
    let mut offset = 0;
    for block in inst.cone().blocks() {
        match block {
            ConeBlock::Orthant { dim } => {
                for (i, row) in transform.iter_mut().enumerate() {
                    for c in 0..*dim {
                        let hit = i >= offset && i - offset == c;
                        row.push(if hit { BigRational::one() } else { BigRational::zero() });
                    }
                }
            }
            ConeBlock::Polyhedral { rows, dim } => {
                for (i, trow) in transform.iter_mut().enumerate() {
                    for mrow in rows {
                        let v = if i >= offset && i < offset + dim { rat(mrow[i - offset]) } else { BigRational::zero() };
                        trow.push(v);
                    }
                }
            }
            _ => unreachable!("checked polyhedral"),
        }
        offset += block.dim();
    }
    let width = transform[0].len();

    // Row j: (a^j)ᵀ T z_u - s_j = 1.
    let mut p = Vec::with_capacity(n);
    for (j, col) in inst.columns().iter().enumerate() {
        let mut row = vec![BigRational::zero(); width + n];
        for (c, slot) in row.iter_mut().enumerate().take(width) {
            *slot = col
                .iter()
                .zip(&transform)
                .fold(BigRational::zero(), |acc, (&a, t)| acc + rat(a) * &t[c]);
        }
        row[width + j] = -BigRational::one();
        p.push(row);
    }
    let q = vec![BigRational::one(); n];

    let Some(z) = lp::find_nonnegative_solution(&p, &q) else {
        return Ok(DualLpOutcome::NoCertificate);
    };
    let u: Vec<BigRational> = transform
        .iter()
        .map(|t| t.iter().zip(&z).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
        .collect();
    match DualCertificate::new(inst, u)? {
        Some(cert) => Ok(DualLpOutcome::Certificate(cert)),
        None => Err(Error::InconsistentState {
            beta: Vec::new(),
            detail: "dual LP returned a point that fails certificate verification".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::ConeSpec;
    use crate::model::RhsSet;

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

    fn r(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn verify_examples() {
        assert!(verify_certificate(&i1(), &r(&[1, 0])).unwrap());
        assert!(!verify_certificate(&i1(), &r(&[0, 0])).unwrap());
        assert!(!verify_certificate(&i2(), &r(&[-1, 2])).unwrap());
        assert!(!verify_certificate(&i2(), &r(&[-2, 3])).unwrap());
        assert!(matches!(verify_certificate(&i1(), &r(&[1])), Err(Error::Dimension { .. })));
    }

    #[test]
    fn kbar_examples() {
        let cert = DualCertificate::new(&i1(), r(&[1, 0])).unwrap().unwrap();
        let h = RhsSet::new_box(vec![0, -5], vec![5, 0]).unwrap().enumerate(100).unwrap();
        assert_eq!(compute_kbar(&cert, &h).unwrap(), 5);
        assert_eq!(compute_kbar(&cert, &[vec![0, 0]]).unwrap(), 0);
        assert_eq!(compute_kbar(&cert, &[vec![-3, 0]]).unwrap(), 0);
        let half = DualCertificate::new(&i1(), vec![BigRational::new(3.into(), 2.into()), rat(0)])
            .unwrap()
            .unwrap();
        assert_eq!(compute_kbar(&half, &[vec![3, 0]]).unwrap(), 5);
    }

    #[test]
    fn dual_lp_examples() {
        match solve_dual_lp(&i1()).unwrap() {
            DualLpOutcome::Certificate(c) => assert_eq!(c.u(), &r(&[1, 0])[..]),
            other => panic!("unexpected {other:?}"),
        }
        let zero = Instance::nonnegative(vec![vec![0], vec![0]], ConeSpec::orthant(2).unwrap()).unwrap();
        assert_eq!(solve_dual_lp(&zero).unwrap(), DualLpOutcome::NoCertificate);
        assert_eq!(solve_dual_lp(&i2()).unwrap(), DualLpOutcome::UnsupportedCone);
    }

    #[test]
    fn dual_lp_through_polyhedral_block() {
        // K = {v : v1 - v2 >= 0, v2 >= 0}; K* = cone{(1,-1), (0,1)}.
        let cone = ConeSpec::new(vec![ConeBlock::polyhedral(vec![vec![1, -1], vec![0, 1]]).unwrap()]).unwrap();
        let inst = Instance::nonnegative(vec![vec![1, 0], vec![0, 1]], cone).unwrap();
        let DualLpOutcome::Certificate(c) = solve_dual_lp(&inst).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(verify_certificate(&inst, c.u()).unwrap());
    }
}
