//! Random generators and a brute-force model of structured matrices shared by
//! the integration tests.
//!
//! The model lists nonzero scalar entries inside a window by walking explicit
//! blocks and enumerating term blocks one at a time. It never calls
//! `entry_at`, `block_at` or `mul`, so agreement with them is meaningful.
#![allow(dead_code)]

use std::collections::BTreeMap;

use ibn_core::{Block, BlockIndex, Generator, NcPoly, PatternTerm, RingMatrix, StructuredMatrix, Word};
use proptest::prelude::*;
use rand::Rng;

/// Plain description of a matrix: explicit blocks filled from a value list,
/// then terms `(a, L, b, e, c)`.
#[derive(Debug, Clone)]
pub struct RawMatrix {
    pub k: u64,
    pub blocks: Vec<(u64, u64, Vec<i64>)>,
    pub terms: Vec<(u64, u64, u64, u64, i64)>,
}

pub fn width(k: u64, block: u64) -> u64 {
    if block == 1 {
        1
    } else {
        k
    }
}

pub fn origin(k: u64, block: u64) -> u64 {
    if block == 1 {
        1
    } else {
        2 + k * (block - 2)
    }
}

impl RawMatrix {
    pub fn build(&self) -> StructuredMatrix {
        let blocks = self.blocks.iter().map(|(r, c, vals)| {
            let (h, w) = (width(self.k, *r) as usize, width(self.k, *c) as usize);
            let rows = (0..h).map(|i| (0..w).map(|j| vals[(i * w + j) % vals.len()]).collect()).collect();
            (BlockIndex::new(*r, *c).unwrap(), Block::from_rows(rows).unwrap())
        });
        let terms = self.terms.iter().map(|&(a, l, b, e, c)| PatternTerm::new(a, l, b, e, c).unwrap()).collect();
        StructuredMatrix::from_parts(self.k, blocks, terms).unwrap()
    }
}

pub fn random_raw<R: Rng>(rng: &mut R, k: u64) -> RawMatrix {
    let blocks = (0..rng.gen_range(0..=4))
        .map(|_| {
            let vals = (0..4).map(|_| rng.gen_range(-3..=3)).collect();
            (rng.gen_range(1..=6), rng.gen_range(1..=6), vals)
        })
        .collect();
    let terms = (0..rng.gen_range(0..=3))
        .map(|_| {
            let c = [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
            (rng.gen_range(2..=7), rng.gen_range(1..=3), rng.gen_range(2..=7), rng.gen_range(1..=3), c)
        })
        .collect();
    RawMatrix { k, blocks, terms }
}

pub fn random_matrix<R: Rng>(rng: &mut R, k: u64) -> StructuredMatrix {
    random_raw(rng, k).build()
}

/// Mostly sparse entries so products of larger ring matrices stay cheap.
pub fn random_ring_matrix<R: Rng>(rng: &mut R, k: u64, rows: usize, cols: usize) -> RingMatrix {
    let entries = (0..rows * cols)
        .map(|_| if rng.gen_bool(0.4) { StructuredMatrix::zero(k).unwrap() } else { random_matrix(rng, k) })
        .collect();
    RingMatrix::from_entries(k, rows, cols, entries).unwrap()
}

pub fn random_poly<R: Rng>(rng: &mut R, p: u32, max_len: usize) -> NcPoly {
    let mut u = NcPoly::zero(p).unwrap();
    for _ in 0..rng.gen_range(1..=3) {
        let len = rng.gen_range(0..=max_len);
        let letters = (0..len)
            .map(|_| {
                let i = rng.gen_range(1..=p);
                if rng.gen_bool(0.5) {
                    Generator::x(i)
                } else {
                    Generator::y(i)
                }
            })
            .collect();
        let c = rng.gen_range(-3..=3);
        u = u.add(&NcPoly::monomial(p, Word(letters), c).unwrap()).unwrap();
    }
    u
}

prop_compose! {
    pub fn arb_raw(k: u64)(
        blocks in prop::collection::vec((1u64..=6, 1u64..=6, prop::collection::vec(-3i64..=3, 4)), 0..=4),
        terms in prop::collection::vec(
            (2u64..=7, 1u64..=3, 2u64..=7, 1u64..=3, prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3])),
            0..=3,
        ),
    ) -> RawMatrix {
        RawMatrix { k, blocks, terms }
    }
}

pub fn arb_matrix(k: u64) -> impl Strategy<Value = StructuredMatrix> {
    arb_raw(k).prop_map(|r| r.build())
}

/// Scalar entries `(i, j) -> value`, zeros omitted.
pub type Sparse = BTreeMap<(u64, u64), i128>;

fn put(out: &mut Sparse, i: u64, j: u64, v: i128) {
    let slot = out.entry((i, j)).or_insert(0);
    *slot += v;
    if *slot == 0 {
        out.remove(&(i, j));
    }
}

/// All nonzero entries with `i <= max_row` and `j <= max_col`. At least one
/// bound must be finite for the enumeration to stop.
pub fn support(a: &StructuredMatrix, max_row: u64, max_col: u64) -> Sparse {
    let k = a.k();
    let mut out = Sparse::new();
    for (idx, block) in a.blocks() {
        let (r0, c0) = (origin(k, idx.row), origin(k, idx.col));
        for r in 0..block.rows() {
            for c in 0..block.cols() {
                let (i, j) = (r0 + r as u64, c0 + c as u64);
                if i <= max_row && j <= max_col {
                    put(&mut out, i, j, block.get(r, c) as i128);
                }
            }
        }
    }
    for t in a.patterns() {
        for s in 0.. {
            let row = t.row_start() + t.row_step() * s;
            let col = t.col_start() + t.col_step() * s;
            let (r0, c0) = (origin(k, row), origin(k, col));
            if r0 > max_row || c0 > max_col {
                break;
            }
            for d in 0..k {
                if r0 + d <= max_row && c0 + d <= max_col {
                    put(&mut out, r0 + d, c0 + d, t.coeff() as i128);
                }
            }
        }
    }
    out
}

pub fn window(a: &StructuredMatrix, n: u64) -> Sparse {
    support(a, n, n)
}

pub fn sparse_add(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = a.clone();
    for (&(i, j), &v) in b {
        put(&mut out, i, j, v);
    }
    out
}

/// Entries of `AB` in the `n x n` window, as a convolution over the full
/// rows of `A` and columns of `B`.
pub fn product_window(a: &StructuredMatrix, b: &StructuredMatrix, n: u64) -> Sparse {
    let left = support(a, n, u64::MAX / 4);
    let right = support(b, u64::MAX / 4, n);
    let mut by_row: BTreeMap<u64, Vec<(u64, i128)>> = BTreeMap::new();
    for (&(l, j), &v) in &right {
        by_row.entry(l).or_default().push((j, v));
    }
    let mut out = Sparse::new();
    for (&(i, l), &u) in &left {
        for &(j, v) in by_row.get(&l).into_iter().flatten() {
            put(&mut out, i, j, u * v);
        }
    }
    out
}

pub fn transpose_window(a: &Sparse) -> Sparse {
    a.iter().map(|(&(i, j), &v)| ((j, i), v)).collect()
}

/// Column of `A` feeding column `j` of the `l`-th split part.
pub fn split_source(k: u64, l: u64, j: u64) -> u64 {
    if j == 1 {
        return l;
    }
    let (n, o) = (2 + (j - 2) / k, (j - 2) % k);
    origin(k, n + l + k * (n - 2)) + o
}

/// Window of the `l`-th split part of `A`.
pub fn split_window(a: &StructuredMatrix, l: u64, n: u64) -> Sparse {
    let k = a.k();
    let wide = support(a, n, split_source(k, l, n));
    let mut out = Sparse::new();
    for j in 1..=n {
        let src = split_source(k, l, j);
        for i in 1..=n {
            if let Some(&v) = wide.get(&(i, src)) {
                out.insert((i, j), v);
            }
        }
    }
    out
}

/// First `(i, j)` in the window where `entry_at` disagrees with the model.
pub fn first_disagreement(a: &StructuredMatrix, model: &Sparse, n: u64) -> Option<(u64, u64, i64, i128)> {
    for i in 1..=n {
        for j in 1..=n {
            let got = a.entry_at(i, j).unwrap();
            let want = model.get(&(i, j)).copied().unwrap_or(0);
            if got as i128 != want {
                return Some((i, j, got, want));
            }
        }
    }
    None
}

/// A block index past which no diagonal block of `a` can hold anything but
/// sums of `c I_k` from terms running along the diagonal.
pub fn diagonal_horizon(a: &StructuredMatrix) -> u64 {
    let mut h = 1;
    for (idx, _) in a.blocks() {
        h = h.max(idx.row).max(idx.col);
    }
    for t in a.patterns() {
        let spread = t.row_start().abs_diff(t.col_start());
        h = h.max(t.row_start().max(t.col_start()) + t.row_step().max(t.col_step()) * spread);
    }
    h + 1
}

/// `T_k` by summing diagonal entries up to the horizon.
pub fn brute_trace(a: &StructuredMatrix) -> u64 {
    let k = a.k();
    let last = origin(k, diagonal_horizon(a) + 1) - 1;
    let w = window(a, last);
    let sum: i128 = w.iter().filter(|((i, j), _)| i == j).map(|(_, v)| v).sum();
    sum.rem_euclid(k as i128) as u64
}
