#![allow(dead_code)]

use conic_feas::{ConeBlock, ConeSpec, Instance, VarSign};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeKind {
    Orthant,
    Soc,
    Polyhedral,
    OrthantSoc,
}

impl ConeKind {
    pub fn label(self) -> &'static str {
        match self {
            ConeKind::Orthant => "orthant",
            ConeKind::Soc => "soc",
            ConeKind::Polyhedral => "polyhedral",
            ConeKind::OrthantSoc => "orthant x soc",
        }
    }
}

pub struct Case {
    pub id: usize,
    pub kind: ConeKind,
    pub inst: Instance,
    pub h: Vec<Vec<i64>>,
}

impl Case {
    pub fn label(&self) -> String {
        format!("case {} ({}, m={}, n={})", self.id, self.kind.label(), self.inst.m(), self.inst.n())
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cone(rng: &mut ChaCha8Rng, m: usize, kind: ConeKind) -> ConeSpec {
    let blocks = match kind {
        ConeKind::Orthant => vec![ConeBlock::orthant(m).unwrap()],
        ConeKind::Soc => vec![ConeBlock::second_order(m).unwrap()],
        ConeKind::Polyhedral => loop {
            let rows = rng.gen_range(m..=m + 1);
            let mat: Vec<Vec<i64>> = (0..rows).map(|_| (0..m).map(|_| rng.gen_range(-2..=2)).collect()).collect();
            if let Ok(b) = ConeBlock::polyhedral(mat) {
                break vec![b];
            }
        },
        ConeKind::OrthantSoc => {
            let r = rng.gen_range(1..m);
            vec![ConeBlock::orthant(r).unwrap(), ConeBlock::second_order(m - r).unwrap()]
        }
    };
    ConeSpec::new(blocks).unwrap()
}

/// Lexicographic box with at most `max_points` points.
pub fn random_box(rng: &mut ChaCha8Rng, m: usize, max_points: usize) -> Vec<Vec<i64>> {
    let lower: Vec<i64> = (0..m).map(|_| rng.gen_range(-4..=0)).collect();
    let mut widths: Vec<usize> = (0..m).map(|_| rng.gen_range(2..=7)).collect();
    while widths.iter().product::<usize>() > max_points {
        let i = (0..m).max_by_key(|&i| (widths[i], i)).unwrap();
        widths[i] -= 1;
    }
    let mut out = vec![Vec::new()];
    for i in 0..m {
        let lo = lower[i];
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..widths[i] as i64).map(move |d| {
                    let mut q = p.clone();
                    q.push(lo + d);
                    q
                })
            })
            .collect();
    }
    out
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<i64>> {
    (0..m).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect()
}

/// Random instances with `m <= 4`, `n <= 3`, entries of `A` in `[-3, 3]`,
/// cones cycling through the four kinds, and boxes of at most 200 points.
pub fn corpus(seed: u64, count: usize) -> Vec<Case> {
    let mut rng = rng(seed);
    let kinds = [ConeKind::Orthant, ConeKind::Soc, ConeKind::Polyhedral, ConeKind::OrthantSoc];
    (0..count)
        .map(|id| {
            let kind = kinds[id % kinds.len()];
            let min_m = if kind == ConeKind::OrthantSoc { 2 } else { 1 };
            let m = rng.gen_range(min_m..=4);
            let n = rng.gen_range(1..=3);
            let cone = random_cone(&mut rng, m, kind);
            let inst = Instance::nonnegative(random_matrix(&mut rng, m, n), cone).unwrap();
            let h = random_box(&mut rng, m, 200);
            Case { id, kind, inst, h }
        })
        .collect()
}

/// Instances with at least one free variable whose feasible `x` all satisfy
/// `|x_j| <= 4` on the sampled right-hand sides: `A` stacks random rows over
/// `I` and `-I`, and the last `2n` coordinates of every point stay `<= 4`.
pub fn free_corpus(seed: u64, count: usize) -> Vec<Case> {
    let mut rng = rng(seed);
    (0..count)
        .map(|id| {
            let n = rng.gen_range(1..=2);
            let r = rng.gen_range(1..=2);
            let kind = if r >= 2 && rng.gen_bool(0.5) { ConeKind::Soc } else { ConeKind::Orthant };
            let mut rows = random_matrix(&mut rng, r, n);
            for sign in [1, -1] {
                for j in 0..n {
                    rows.push((0..n).map(|c| if c == j { sign } else { 0 }).collect());
                }
            }
            let head = random_cone(&mut rng, r, kind);
            let mut blocks = head.blocks().to_vec();
            blocks.push(ConeBlock::orthant(2 * n).unwrap());
            let cone = ConeSpec::new(blocks).unwrap();
            let mut signs: Vec<VarSign> = (0..n)
                .map(|_| if rng.gen_bool(0.6) { VarSign::Free } else { VarSign::Nonnegative })
                .collect();
            if !signs.contains(&VarSign::Free) {
                *signs.choose_mut(&mut rng).unwrap() = VarSign::Free;
            }
            let inst = Instance::new(rows, cone, signs).unwrap();
            let m = inst.m();
            let h = (0..40)
                .map(|_| {
                    (0..m)
                        .map(|i| if i < r { rng.gen_range(-4..=4) } else { rng.gen_range(-1..=4) })
                        .collect()
                })
                .collect();
            Case { id, kind, inst, h }
        })
        .collect()
}

/// Every `x ∈ Z^n_+` with `1ᵀx <= k`.
pub fn bounded_sum_vectors(n: usize, k: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u64>| {
                let used: u64 = p.iter().sum();
                (0..=k - used).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}
