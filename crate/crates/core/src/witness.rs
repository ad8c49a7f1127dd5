//! Explicit isomorphisms `R_k^m -> R_k^n` for `m = n (mod k)` and the trace
//! certificate ruling them out otherwise.
//!
//! The basic isomorphism `R_k -> R_k^{k+1}` sends `A` to `(A_1, ..., A_{k+1})`
//! where the first column of `A_l` is column `l` of `A` and block column
//! `n >= 2` of `A_l` is block column `n + l + k(n-2)` of `A`. Right
//! multiplication by the selection matrix `X_l` realizes `A -> A_l`, and the
//! transposes `Y_l = X_l^T` put the pieces back together.

use std::fmt;
use std::ops::RangeInclusive;

use crate::arith::{PatternTerm, Progression};
use crate::blockmat::{block_origin, block_width, check_k, locate, BlockIndex, StructuredMatrix};
use crate::dense::Block;
use crate::error::{CheckedExt, Error, Result};
use crate::exec::Execution;
use crate::modtrace::{trace_ring_matrix, Residue};
use crate::ringmat::RingMatrix;

/// Scalar column of `A` that becomes column `j` of `A_l`.
pub fn column_source(k: u64, l: u64, j: u64) -> u64 {
    assert!(k >= 1 && (1..=k + 1).contains(&l) && j >= 1);
    if j == 1 {
        return l;
    }
    let (n, offset) = locate(k, j);
    let source_block = n + l + k * (n - 2);
    block_origin(k, source_block) + offset as u64
}

fn check_part(k: u64, l: u64) -> Result<()> {
    check_k(k)?;
    if !(1..=k + 1).contains(&l) {
        return Err(Error::IndexOutOfRange(format!("part {l} of a {}-way split", k + 1)));
    }
    Ok(())
}

/// `A_l`, computed directly from the column formula.
pub fn split_part(a: &StructuredMatrix, l: u64) -> Result<StructuredMatrix> {
    let k = a.k();
    check_part(k, l)?;
    let (first_block, first_offset) = locate(k, l);
    let mut blocks: Vec<(BlockIndex, Block)> = Vec::new();
    let mut patterns = Vec::new();

    for (idx, b) in a.blocks() {
        if idx.col == first_block {
            let mut col = Block::zeros(b.rows(), 1);
            for r in 0..b.rows() {
                col.set(r, 0, b.get(r, first_offset));
            }
            blocks.push((BlockIndex { row: idx.row, col: 1 }, col));
        }
        if idx.col >= 2 + l && (idx.col - 2 - l).is_multiple_of(k + 1) {
            let n = (idx.col - 2 - l) / (k + 1) + 2;
            blocks.push((BlockIndex { row: idx.row, col: n }, b.clone()));
        }
    }

    let targets = Progression::new(2 + l, k + 1)?;
    const W: &str = "column split";
    for t in a.patterns() {
        if first_block == 2 {
            if let Some(row) = t.row_for_col(2) {
                let mut col = Block::zeros(block_width(k, row), 1);
                col.set(first_offset, 0, t.coeff());
                blocks.push((BlockIndex { row, col: 1 }, col));
            }
        }
        if let Some(meet) = t.cols().intersect(&targets)? {
            let s0 = (meet.start() - t.col_start()) / t.col_step();
            let s_step = meet.step() / t.col_step();
            let part = PatternTerm::new(
                (meet.start() - 2 - l) / (k + 1) + 2,
                meet.step() / (k + 1),
                t.row_step().ck_mul(s0, W)?.ck_add(t.row_start(), W)?,
                t.row_step().ck_mul(s_step, W)?,
                t.coeff(),
            )?;
            patterns.push(part);
        }
    }
    StructuredMatrix::from_parts(k, blocks, patterns)
}

/// `(A_1, ..., A_{k+1})`.
pub fn split_apply(a: &StructuredMatrix) -> Result<Vec<StructuredMatrix>> {
    (1..=a.k() + 1).map(|l| split_part(a, l)).collect()
}

/// Inverse of [`split_apply`]: places every column of every part back where
/// it came from.
pub fn merge_columns(parts: &[StructuredMatrix]) -> Result<StructuredMatrix> {
    let k = parts.first().ok_or_else(|| Error::Shape("no parts to merge".into()))?.k();
    if parts.len() as u64 != k + 1 {
        return Err(Error::Shape(format!("expected {} parts, got {}", k + 1, parts.len())));
    }
    const W: &str = "column merge";
    let mut blocks: Vec<(BlockIndex, Block)> = Vec::new();
    let mut patterns = Vec::new();
    for (l, part) in (1u64..).zip(parts) {
        if part.k() != k {
            return Err(Error::MismatchedBlockSize(k, part.k()));
        }
        let (first_block, first_offset) = locate(k, l);
        for (idx, b) in part.blocks() {
            if idx.col == 1 {
                let mut wide = Block::zeros(b.rows(), block_width(k, first_block));
                for r in 0..b.rows() {
                    wide.set(r, first_offset, b.get(r, 0));
                }
                blocks.push((BlockIndex { row: idx.row, col: first_block }, wide));
            } else {
                let col = (k + 1).ck_mul(idx.col - 2, W)?.ck_add(2 + l, W)?;
                blocks.push((BlockIndex { row: idx.row, col }, b.clone()));
            }
        }
        for t in part.patterns() {
            patterns.push(PatternTerm::new(
                (k + 1).ck_mul(t.col_start() - 2, W)?.ck_add(2 + l, W)?,
                (k + 1).ck_mul(t.col_step(), W)?,
                t.row_start(),
                t.row_step(),
                t.coeff(),
            )?);
        }
    }
    StructuredMatrix::from_parts(k, blocks, patterns)
}

/// The matrix `X_l` with `A * X_l = A_l` for every `A`: a unit entry moving
/// column `l` into column 1, and identity blocks taking block column
/// `(k+1)(n-2) + 2 + l` to block column `n`.
pub fn selection_matrix(k: u64, l: u64) -> Result<StructuredMatrix> {
    check_part(k, l)?;
    let unit = StructuredMatrix::from_entries(k, [(l, 1, 1)])?;
    let spread = PatternTerm::new(2, 1, 2 + l, k + 1, 1)?;
    unit.add(&StructuredMatrix::from_term(k, spread)?)
}

/// The row `X = [X_1 ... X_{k+1}]` and the column `Y = [Y_1; ...; Y_{k+1}]`
/// with `XY = I_1` and `YX = I_{k+1}`.
#[derive(Debug, Clone)]
pub struct SplitIso {
    pub x: RingMatrix,
    pub y: RingMatrix,
}

pub fn split_iso(k: u64) -> Result<SplitIso> {
    check_k(k)?;
    let xs = (1..=k + 1).map(|l| selection_matrix(k, l)).collect::<Result<Vec<_>>>()?;
    let ys = xs.iter().map(StructuredMatrix::transpose).collect();
    let parts = (k + 1) as usize;
    let iso = SplitIso { x: RingMatrix::from_entries(k, 1, parts, xs)?, y: RingMatrix::from_entries(k, parts, 1, ys)? };
    if !iso.x.mul(&iso.y)?.equals(&RingMatrix::identity(k, 1)?)? {
        return Err(Error::Validation(format!("split isomorphism for k = {k}: XY != I_1")));
    }
    if !iso.y.mul(&iso.x)?.equals(&RingMatrix::identity(k, parts)?)? {
        return Err(Error::Validation(format!("split isomorphism for k = {k}: YX != I_{parts}")));
    }
    Ok(iso)
}

/// Why no witness exists for `(k, m, n)`: the traces of the two identities differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Obstruction {
    pub k: u64,
    pub m: usize,
    pub n: usize,
    pub trace_m: Residue,
    pub trace_n: Residue,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "𝔗_{k}(I_{m})={a} ≠ {b}=𝔗_{k}(I_{n}) mod {k}",
            k = self.k,
            m = self.m,
            n = self.n,
            a = self.trace_m.value(),
            b = self.trace_n.value()
        )
    }
}

pub fn obstruction(k: u64, m: usize, n: usize) -> Result<Option<Obstruction>> {
    let trace_m = trace_ring_matrix(&RingMatrix::identity(k, m)?)?;
    let trace_n = trace_ring_matrix(&RingMatrix::identity(k, n)?)?;
    Ok((trace_m != trace_n).then_some(Obstruction { k, m, n, trace_m, trace_n }))
}

/// Matrices `X` (m x n) and `Y` (n x m) over `R_k`, claimed to satisfy
/// `XY = I_m` and `YX = I_n`. Pairs from [`witness_pair`] are verified;
/// pairs assembled with [`WitnessPair::from_parts`] are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPair {
    k: u64,
    m: usize,
    n: usize,
    steps: usize,
    x: RingMatrix,
    y: RingMatrix,
}

impl WitnessPair {
    pub fn from_parts(k: u64, m: usize, n: usize, x: RingMatrix, y: RingMatrix) -> Result<Self> {
        check_k(k)?;
        if x.k() != k || y.k() != k {
            return Err(Error::MismatchedBlockSize(k, if x.k() != k { x.k() } else { y.k() }));
        }
        if (x.rows(), x.cols()) != (m, n) || (y.rows(), y.cols()) != (n, m) {
            return Err(Error::Shape(format!(
                "witness for ({m}, {n}) needs X {m}x{n} and Y {n}x{m}, got {}x{} and {}x{}",
                x.rows(),
                x.cols(),
                y.rows(),
                y.cols()
            )));
        }
        let steps = m.abs_diff(n) / k as usize;
        Ok(WitnessPair { k, m, n, steps, x, y })
    }

    pub fn k(&self) -> u64 {
        self.k
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    /// Number of applications of the basic isomorphism, `|m - n| / k`.
    pub fn steps(&self) -> usize {
        self.steps
    }
    pub fn x(&self) -> &RingMatrix {
        &self.x
    }
    pub fn y(&self) -> &RingMatrix {
        &self.y
    }
}

/// `d x (d+k)` matrix splitting the first coordinate, identity on the rest.
fn step_forward(iso: &SplitIso, d: usize) -> Result<RingMatrix> {
    let k = iso.x.k();
    let ku = k as usize;
    let mut s = RingMatrix::zeros(k, d, d + ku)?;
    for l in 0..=ku {
        s.set(0, l, iso.x.get(0, l).clone())?;
    }
    let id = StructuredMatrix::identity(k)?;
    for r in 1..d {
        s.set(r, r + ku, id.clone())?;
    }
    Ok(s)
}

/// `(d+k) x d` inverse of [`step_forward`].
fn step_backward(iso: &SplitIso, d: usize) -> Result<RingMatrix> {
    let k = iso.x.k();
    let ku = k as usize;
    let mut s = RingMatrix::zeros(k, d + ku, d)?;
    for l in 0..=ku {
        s.set(l, 0, iso.y.get(l, 0).clone())?;
    }
    let id = StructuredMatrix::identity(k)?;
    for r in ku + 1..d + ku {
        s.set(r, r - ku, id.clone())?;
    }
    Ok(s)
}

pub fn witness_pair(k: u64, m: usize, n: usize) -> Result<WitnessPair> {
    witness_pair_with(k, m, n, Execution::default())
}

/// Builds and verifies a witness pair by chaining the basic isomorphism on
/// the first coordinate `|m - n| / k` times. Fails with
/// [`Error::Obstructed`] when `m` and `n` differ mod `k`.
pub fn witness_pair_with(k: u64, m: usize, n: usize, exec: Execution) -> Result<WitnessPair> {
    check_k(k)?;
    if m < 1 || n < 1 {
        return Err(Error::Invalid(format!("ranks must be positive, got m = {m}, n = {n}")));
    }
    if let Some(obs) = obstruction(k, m, n)? {
        return Err(Error::Obstructed(obs));
    }
    let (lo, hi) = (m.min(n), m.max(n));
    let mut x = RingMatrix::identity(k, lo)?;
    let mut y = RingMatrix::identity(k, lo)?;
    if lo != hi {
        let iso = split_iso(k)?;
        let mut d = lo;
        while d < hi {
            x = x.mul_with(&step_forward(&iso, d)?, exec)?;
            y = step_backward(&iso, d)?.mul_with(&y, exec)?;
            d += k as usize;
        }
    }
    let pair = if m <= n { WitnessPair::from_parts(k, m, n, x, y)? } else { WitnessPair::from_parts(k, m, n, y, x)? };
    let report = verify_witness_with(&pair, exec)?;
    if !report.passed {
        return Err(Error::Validation(format!("constructed witness for (k={k}, m={m}, n={n}) failed: {report}")));
    }
    Ok(pair)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Product {
    XY,
    YX,
}

/// First entry of a product that differs from the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mismatch {
    pub product: Product,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub k: u64,
    pub m: usize,
    pub n: usize,
    pub xy_is_identity: bool,
    pub yx_is_identity: bool,
    pub mismatch: Option<Mismatch>,
    /// `[T(I_m), T(XY), T(YX), T(I_n)]`.
    pub trace_chain: [Residue; 4],
    pub passed: bool,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.trace_chain.map(|r| r.value());
        write!(
            f,
            "{}: 𝔗_{k}(I_{m})={a} = 𝔗_{k}(XY)={b} = 𝔗_{k}(YX)={c} = 𝔗_{k}(I_{n})={d} (mod {k})",
            if self.passed { "pass" } else { "fail" },
            k = self.k,
            m = self.m,
            n = self.n,
        )?;
        if let Some(mm) = self.mismatch {
            write!(f, "; {:?} differs from the identity at entry ({}, {})", mm.product, mm.row + 1, mm.col + 1)?;
        }
        Ok(())
    }
}

pub fn verify_witness(w: &WitnessPair) -> Result<VerificationReport> {
    verify_witness_with(w, Execution::default())
}

/// Recomputes both products, compares them with the identities and reports
/// the trace chain.
pub fn verify_witness_with(w: &WitnessPair, exec: Execution) -> Result<VerificationReport> {
    let (k, m, n) = (w.k, w.m, w.n);
    let xy = w.x.mul_with(&w.y, exec)?;
    let yx = w.y.mul_with(&w.x, exec)?;
    let id_m = RingMatrix::identity(k, m)?;
    let id_n = RingMatrix::identity(k, n)?;
    let xy_diff = xy.first_difference(&id_m)?;
    let yx_diff = yx.first_difference(&id_n)?;
    let mismatch = xy_diff
        .map(|(row, col)| Mismatch { product: Product::XY, row, col })
        .or(yx_diff.map(|(row, col)| Mismatch { product: Product::YX, row, col }));
    let trace_chain =
        [trace_ring_matrix(&id_m)?, trace_ring_matrix(&xy)?, trace_ring_matrix(&yx)?, trace_ring_matrix(&id_n)?];
    let traces_agree = trace_chain.iter().all(|t| *t == trace_chain[0]);
    Ok(VerificationReport {
        k,
        m,
        n,
        xy_is_identity: xy_diff.is_none(),
        yx_is_identity: yx_diff.is_none(),
        mismatch,
        trace_chain,
        passed: mismatch.is_none() && traces_agree,
    })
}

/// Outcome of deciding `R_k^m ~ R_k^n`.
#[derive(Debug, Clone)]
pub enum Certificate {
    Isomorphic(Box<WitnessPair>),
    Impossible(Obstruction),
}

pub fn certify(k: u64, m: usize, n: usize) -> Result<Certificate> {
    certify_with(k, m, n, Execution::default())
}

pub fn certify_with(k: u64, m: usize, n: usize, exec: Execution) -> Result<Certificate> {
    match witness_pair_with(k, m, n, exec) {
        Ok(w) => Ok(Certificate::Isomorphic(Box::new(w))),
        Err(Error::Obstructed(o)) => Ok(Certificate::Impossible(o)),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone)]
pub struct GridCell {
    pub k: u64,
    pub m: usize,
    pub n: usize,
    pub outcome: Result<Verdict>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// A witness was built and verified.
    Isomorphic {
        steps: usize,
    },
    Impossible(Obstruction),
}

/// Decides every `(k, m, n)` with `k` in `ks` and `m, n` in `dims`. Cells are
/// independent and evaluated according to `exec`; each cell runs its own
/// products sequentially.
pub fn certify_grid(ks: &[u64], dims: RangeInclusive<usize>, exec: Execution) -> Vec<GridCell> {
    let mut cells = Vec::new();
    for &k in ks {
        for m in dims.clone() {
            cells.extend(dims.clone().map(|n| (k, m, n)));
        }
    }
    exec.map_slice(&cells, |&(k, m, n)| {
        let outcome = certify_with(k, m, n, Execution::Sequential).map(|c| match c {
            Certificate::Isomorphic(w) => Verdict::Isomorphic { steps: w.steps() },
            Certificate::Impossible(o) => Verdict::Impossible(o),
        });
        GridCell { k, m, n, outcome }
    })
}
