//! Exact product cones and the partial order they induce.
//!
//! A [`ConeSpec`] is an ordered product of blocks. Each block is a closed,
//! convex, pointed cone:
//!
//! * `Orthant(dim)`: `{v : v >= 0}`.
//! * `Polyhedral(M)`: `{v : M v >= 0}` with integer `M` of full column rank.
//! * `SecondOrder(dim)`: `{v : v_last >= ||v_head||_2}`; the last coordinate
//!   is the scalar part.
//! * `Psd(d)`: symmetric `d x d` PSD matrices, packed upper-triangular
//!   row-major with raw entries, so `dim = d(d+1)/2`.
//!
//! Primal membership runs in integer arithmetic and dual membership in
//! rational arithmetic; nothing here uses floating point.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::bound::lp;
use crate::error::{Error, Result};
use crate::exact;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeBlock {
    Orthant { dim: usize },
    /// Rows of `M`; the cone is `{v : M v >= 0}`.
    Polyhedral { rows: Vec<Vec<i64>>, dim: usize },
    SecondOrder { dim: usize },
    Psd { order: usize },
}

impl ConeBlock {
    pub fn orthant(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("cone.dim", "orthant dimension must be at least 1"));
        }
        Ok(ConeBlock::Orthant { dim })
    }

    pub fn second_order(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("cone.dim", "second-order dimension must be at least 1"));
        }
        Ok(ConeBlock::SecondOrder { dim })
    }

    pub fn psd(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("cone.d", "PSD order must be at least 1"));
        }
        Ok(ConeBlock::Psd { order })
    }

    /// Builds `{v : M v >= 0}`, rejecting ragged or non-pointed `M`.
    pub fn polyhedral(rows: Vec<Vec<i64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::invalid("cone.M", "polyhedral matrix must be nonempty"));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::dimension(format!("cone.M[{i}]"), dim, r.len()));
        }
        let rational: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| exact::rat(v)).collect())
            .collect();
        let rank = exact::rank(&rational);
        if rank < dim {
            return Err(Error::NonPointedCone { block: 0, rank, dim });
        }
        Ok(ConeBlock::Polyhedral { rows, dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConeBlock::Orthant { dim }
            | ConeBlock::Polyhedral { dim, .. }
            | ConeBlock::SecondOrder { dim } => *dim,
            ConeBlock::Psd { order } => order * (order + 1) / 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConeBlock::Orthant { .. } => "orthant",
            ConeBlock::Polyhedral { .. } => "polyhedral",
            ConeBlock::SecondOrder { .. } => "soc",
            ConeBlock::Psd { .. } => "psd",
        }
    }

    fn contains(&self, v: &[i64]) -> bool {
        match self {
            ConeBlock::Orthant { .. } => v.iter().all(|&x| x >= 0),
            ConeBlock::Polyhedral { rows, .. } => rows.iter().all(|row| {
                row.iter()
                    .zip(v)
                    .map(|(&a, &x)| a as i128 * x as i128)
                    .sum::<i128>()
                    >= 0
            }),
            ConeBlock::SecondOrder { .. } => {
                let (&t, head) = v.split_last().expect("dim >= 1");
                if t < 0 {
                    return false;
                }
                let t = t as i128;
                let norm2: i128 = head.iter().map(|&x| x as i128 * x as i128).sum();
                t * t >= norm2
            }
            ConeBlock::Psd { order } => {
                let packed: Vec<BigRational> = v.iter().map(|&x| exact::rat(x)).collect();
                exact::is_psd(exact::unpack_symmetric(&packed, *order))
            }
        }
    }

    fn dual_contains(&self, u: &[BigRational]) -> bool {
        match self {
            ConeBlock::Orthant { .. } => u.iter().all(|x| !x.is_negative()),
            ConeBlock::SecondOrder { .. } => {
                let (t, head) = u.split_last().expect("dim >= 1");
                if t.is_negative() {
                    return false;
                }
                let norm2 = head.iter().fold(BigRational::zero(), |acc, x| acc + x * x);
                t * t >= norm2
            }
            ConeBlock::Psd { order } => exact::is_psd(exact::unpack_symmetric(u, *order)),
            ConeBlock::Polyhedral { rows, dim } => {
                // u in K* iff u = M^T lambda for some lambda >= 0.
                let p: Vec<Vec<BigRational>> = (0..*dim)
                    .map(|c| rows.iter().map(|r| exact::rat(r[c])).collect())
                    .collect();
                lp::find_nonnegative_solution(&p, u).is_some()
            }
        }
    }

    /// True when the block is the orthant up to positive row scaling.
    fn is_orthant_like(&self) -> bool {
        match self {
            ConeBlock::Orthant { .. } => true,
            ConeBlock::Polyhedral { rows, .. } => rows.iter().all(|r| {
                r.iter().filter(|&&x| x != 0).count() == 1 && r.iter().all(|&x| x >= 0)
            }),
            _ => false,
        }
    }
}

/// Product of cone blocks living in `R^m`, `m = total_dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeSpec {
    blocks: Vec<ConeBlock>,
    total_dim: usize,
}

impl ConeSpec {
    pub fn new(blocks: Vec<ConeBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("cone.blocks", "at least one block is required"));
        }
        let total_dim = blocks.iter().map(ConeBlock::dim).sum();
        Ok(ConeSpec { blocks, total_dim })
    }

    /// The nonnegative orthant of dimension `m`.
    pub fn orthant(m: usize) -> Result<Self> {
        Self::new(vec![ConeBlock::orthant(m)?])
    }

    pub fn blocks(&self) -> &[ConeBlock] {
        &self.blocks
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    fn check_len(&self, field: &str, len: usize) -> Result<()> {
        if len != self.total_dim {
            return Err(Error::dimension(field, self.total_dim, len));
        }
        Ok(())
    }

    fn split<'a, T>(&'a self, v: &'a [T]) -> impl Iterator<Item = (&'a ConeBlock, &'a [T])> + 'a {
        let mut offset = 0;
        self.blocks.iter().map(move |b| {
            let part = &v[offset..offset + b.dim()];
            offset += b.dim();
            (b, part)
        })
    }

    /// Exact test of `v ∈ K`.
    pub fn contains(&self, v: &[i64]) -> Result<bool> {
        self.check_len("v", v.len())?;
        Ok(self.contains_unchecked(v))
    }

    pub(crate) fn contains_unchecked(&self, v: &[i64]) -> bool {
        debug_assert_eq!(v.len(), self.total_dim);
        self.split(v).all(|(b, part)| b.contains(part))
    }

    /// `b1 ⪯_K b2`, i.e. `b2 - b1 ∈ K`.
    pub fn leq(&self, b1: &[i64], b2: &[i64]) -> Result<bool> {
        self.check_len("b1", b1.len())?;
        self.check_len("b2", b2.len())?;
        Ok(self.leq_unchecked(b1, b2))
    }

    pub(crate) fn leq_unchecked(&self, b1: &[i64], b2: &[i64]) -> bool {
        let diff: Vec<i64> = b2.iter().zip(b1).map(|(y, x)| y - x).collect();
        self.contains_unchecked(&diff)
    }

    /// Exact test of `u ∈ K*`.
    pub fn dual_contains(&self, u: &[BigRational]) -> Result<bool> {
        self.check_len("u", u.len())?;
        Ok(self.split(u).all(|(b, part)| b.dual_contains(part)))
    }

    /// Componentwise floor `β' = ⌊b⌋`, valid only for orthant-like cones
    /// where it guarantees `b - β' ∈ K` and equal feasibility.
    pub fn floor_to_integral(&self, b: &[BigRational]) -> Result<Vec<i64>> {
        self.check_len("b", b.len())?;
        if let Some((block, bad)) = self
            .blocks
            .iter()
            .enumerate()
            .find(|(_, blk)| !blk.is_orthant_like())
        {
            return Err(Error::UnsupportedCone {
                block,
                kind: bad.kind(),
                operation: "integral rounding",
            });
        }
        b.iter()
            .map(|x| {
                x.numer()
                    .div_floor(x.denom())
                    .to_i64()
                    .ok_or(Error::Overflow { context: "flooring a right-hand side" })
            })
            .collect()
    }

    /// True when every block is orthant or polyhedral.
    pub fn is_polyhedral(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| matches!(b, ConeBlock::Orthant { .. } | ConeBlock::Polyhedral { .. }))
    }
}
