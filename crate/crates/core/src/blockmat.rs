//! Blocked infinite integer matrices with finitely many explicit blocks and
//! finitely many affine families of scalar blocks.
//!
//! Block row/column 1 has width 1; every later block has width `k`. A matrix
//! is the sum of its explicit blocks and its [`PatternTerm`]s, so explicit
//! blocks and pattern blocks may overlap. [`StructuredMatrix::canonicalize`]
//! untangles overlaps into a normal form and [`StructuredMatrix::equals`]
//! decides true equality of the represented infinite matrices.
//!
//! The representation is closed under addition, negation, multiplication and
//! transposition. Every value has finitely many nonzero entries in each row
//! and column, and all but finitely many of its `k x k` blocks are scalar.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::arith::{lcm, PatternTerm};
use crate::dense::Block;
use crate::error::{CheckedExt, Error, Result};

/// Position of a block: `row` is the vertical coordinate, `col` the horizontal one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockIndex {
    pub row: u64,
    pub col: u64,
}

impl BlockIndex {
    pub fn new(row: u64, col: u64) -> Result<Self> {
        if row < 1 || col < 1 {
            return Err(Error::IndexOutOfRange(format!("block index ({row}, {col}) must be >= 1")));
        }
        Ok(BlockIndex { row, col })
    }
}

/// Width of block `index` in the partition for parameter `k`.
pub fn block_width(k: u64, index: u64) -> usize {
    if index == 1 {
        1
    } else {
        k as usize
    }
}

/// Splits a scalar index `i >= 1` into `(block, offset)`.
pub fn locate(k: u64, i: u64) -> (u64, usize) {
    debug_assert!(i >= 1);
    if i == 1 {
        (1, 0)
    } else {
        (2 + (i - 2) / k, ((i - 2) % k) as usize)
    }
}

/// First scalar index covered by `block`.
pub fn block_origin(k: u64, block: u64) -> u64 {
    if block == 1 {
        1
    } else {
        2 + k * (block - 2)
    }
}

/// Reduced direction `(dr, dc)` plus the invariant `row*dc - col*dr` of
/// every block on the line.
type LineKey = (u64, u64, i128);

fn line_of(t: &PatternTerm) -> LineKey {
    let (dr, dc) = t.direction();
    (dr, dc, t.row_start() as i128 * dc as i128 - t.col_start() as i128 * dr as i128)
}

pub(crate) fn check_k(k: u64) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidBlockSize(k));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredMatrix {
    k: u64,
    explicit: BTreeMap<BlockIndex, Block>,
    patterns: Vec<PatternTerm>,
}

impl StructuredMatrix {
    pub fn zero(k: u64) -> Result<Self> {
        check_k(k)?;
        Ok(StructuredMatrix { k, explicit: BTreeMap::new(), patterns: Vec::new() })
    }

    pub fn identity(k: u64) -> Result<Self> {
        let mut id = StructuredMatrix::zero(k)?;
        id.explicit.insert(BlockIndex { row: 1, col: 1 }, Block::scalar(1, 1));
        id.patterns.push(PatternTerm::diagonal(1)?);
        Ok(id)
    }

    /// A single pattern term and nothing else.
    pub fn from_term(k: u64, term: PatternTerm) -> Result<Self> {
        let mut m = StructuredMatrix::zero(k)?;
        m.patterns.push(term);
        Ok(m)
    }

    /// Finitely supported matrix from scalar `(row, col, value)` triples.
    /// Repeated positions are summed; zero blocks are dropped.
    pub fn from_entries<I>(k: u64, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u64, i64)>,
    {
        let mut m = StructuredMatrix::zero(k)?;
        for (i, j, v) in entries {
            if i < 1 || j < 1 {
                return Err(Error::IndexOutOfRange(format!("entry ({i}, {j}) must have indices >= 1")));
            }
            let (br, r) = locate(k, i);
            let (bc, c) = locate(k, j);
            let block = m.block_entry(BlockIndex { row: br, col: bc });
            block.set(r, c, block.get(r, c).ck_add(v, "entry accumulation")?);
        }
        m.prune_zero_blocks();
        Ok(m)
    }

    /// Assembles a matrix from explicit blocks and pattern terms, validating
    /// block shapes. Blocks at the same index are summed.
    pub fn from_parts<B>(k: u64, blocks: B, patterns: Vec<PatternTerm>) -> Result<Self>
    where
        B: IntoIterator<Item = (BlockIndex, Block)>,
    {
        let mut m = StructuredMatrix::zero(k)?;
        for (idx, block) in blocks {
            BlockIndex::new(idx.row, idx.col)?;
            m.add_block(idx, &block)?;
        }
        m.patterns = patterns;
        Ok(m)
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&BlockIndex, &Block)> {
        self.explicit.iter()
    }

    pub fn patterns(&self) -> &[PatternTerm] {
        &self.patterns
    }

    /// True when there are no explicit blocks and no pattern terms.
    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty() && self.patterns.is_empty()
    }

    fn expected_shape(&self, idx: BlockIndex) -> (usize, usize) {
        (block_width(self.k, idx.row), block_width(self.k, idx.col))
    }

    fn block_entry(&mut self, idx: BlockIndex) -> &mut Block {
        let (r, c) = self.expected_shape(idx);
        self.explicit.entry(idx).or_insert_with(|| Block::zeros(r, c))
    }

    fn add_block(&mut self, idx: BlockIndex, block: &Block) -> Result<()> {
        let want = self.expected_shape(idx);
        if block.shape() != want {
            return Err(Error::Shape(format!(
                "block ({}, {}) must be {}x{}, got {}x{}",
                idx.row,
                idx.col,
                want.0,
                want.1,
                block.rows(),
                block.cols()
            )));
        }
        self.block_entry(idx).add_assign(block)
    }

    fn add_scaled_block(&mut self, idx: BlockIndex, block: &Block, c: i64) -> Result<()> {
        self.block_entry(idx).add_scaled(block, c)
    }

    fn add_scalar_block(&mut self, idx: BlockIndex, c: i64) -> Result<()> {
        self.block_entry(idx).add_scalar(c)
    }

    fn prune_zero_blocks(&mut self) {
        self.explicit.retain(|_, b| !b.is_zero());
    }

    fn check_same_k(&self, other: &StructuredMatrix) -> Result<()> {
        if self.k != other.k {
            return Err(Error::MismatchedBlockSize(self.k, other.k));
        }
        Ok(())
    }

    /// Entry `(i, j)` of the represented matrix, 1-based.
    pub fn entry_at(&self, i: u64, j: u64) -> Result<i64> {
        if i < 1 || j < 1 {
            return Err(Error::IndexOutOfRange(format!("entry ({i}, {j}) must have indices >= 1")));
        }
        let (m, r) = locate(self.k, i);
        let (n, c) = locate(self.k, j);
        let mut v = self.explicit.get(&BlockIndex { row: m, col: n }).map_or(0, |b| b.get(r, c));
        if r == c {
            for t in &self.patterns {
                if t.col_for_row(m) == Some(n) {
                    v = v.ck_add(t.coeff(), "entry evaluation")?;
                }
            }
        }
        Ok(v)
    }

    /// Dense block at block position `(m, n)`.
    pub fn block_at(&self, m: u64, n: u64) -> Result<Block> {
        let idx = BlockIndex::new(m, n)?;
        let mut block = match self.explicit.get(&idx) {
            Some(b) => b.clone(),
            None => {
                let (r, c) = self.expected_shape(idx);
                Block::zeros(r, c)
            }
        };
        for t in &self.patterns {
            if t.col_for_row(m) == Some(n) {
                block.add_scalar(t.coeff())?;
            }
        }
        Ok(block)
    }

    pub fn add(&self, other: &StructuredMatrix) -> Result<StructuredMatrix> {
        self.check_same_k(other)?;
        let mut out = self.clone();
        for (idx, b) in &other.explicit {
            out.add_block(*idx, b)?;
        }
        out.patterns.extend_from_slice(&other.patterns);
        out.prune_zero_blocks();
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> Result<StructuredMatrix> {
        if c == 0 {
            return StructuredMatrix::zero(self.k);
        }
        let explicit = self.explicit.iter().map(|(idx, b)| Ok((*idx, b.scaled(c)?))).collect::<Result<_>>()?;
        let patterns = self
            .patterns
            .iter()
            .map(|t| {
                let c = t.coeff().ck_mul(c, "scaling")?;
                Ok(t.with_coeff(c).expect("nonzero product of nonzero integers"))
            })
            .collect::<Result<_>>()?;
        Ok(StructuredMatrix { k: self.k, explicit, patterns })
    }

    pub fn neg(&self) -> Result<StructuredMatrix> {
        self.scale(-1)
    }

    pub fn sub(&self, other: &StructuredMatrix) -> Result<StructuredMatrix> {
        self.add(&other.neg()?)
    }

    /// The product `self * rhs`. Finite block sums handle explicit against
    /// explicit; a term meets any explicit block row or column at most once;
    /// term against term is [`PatternTerm::compose`].
    pub fn mul(&self, rhs: &StructuredMatrix) -> Result<StructuredMatrix> {
        self.check_same_k(rhs)?;
        let mut out = StructuredMatrix::zero(self.k)?;

        let mut rhs_rows: HashMap<u64, Vec<(u64, &Block)>> = HashMap::new();
        for (idx, b) in &rhs.explicit {
            rhs_rows.entry(idx.row).or_default().push((idx.col, b));
        }

        for (idx, a) in &self.explicit {
            if let Some(row) = rhs_rows.get(&idx.col) {
                for &(col, b) in row {
                    let prod = a.mul(b)?;
                    out.add_block(BlockIndex { row: idx.row, col }, &prod)?;
                }
            }
            for t in &rhs.patterns {
                if let Some(col) = t.col_for_row(idx.col) {
                    out.add_scaled_block(BlockIndex { row: idx.row, col }, a, t.coeff())?;
                }
            }
        }

        for t in &self.patterns {
            for (idx, b) in &rhs.explicit {
                if let Some(row) = t.row_for_col(idx.row) {
                    out.add_scaled_block(BlockIndex { row, col: idx.col }, b, t.coeff())?;
                }
            }
            for u in &rhs.patterns {
                if let Some(p) = t.compose(u)? {
                    out.patterns.push(p);
                }
            }
        }

        out.prune_zero_blocks();
        Ok(out)
    }

    pub fn transpose(&self) -> StructuredMatrix {
        StructuredMatrix {
            k: self.k,
            explicit: self
                .explicit
                .iter()
                .map(|(idx, b)| (BlockIndex { row: idx.col, col: idx.row }, b.transpose()))
                .collect(),
            patterns: self.patterns.iter().map(PatternTerm::transpose).collect(),
        }
    }

    /// Normal form representing the same matrix.
    ///
    /// Terms are grouped by the geometric line of blocks they run along and
    /// refined so that all terms on a line share one column step; a line then
    /// splits into residue classes of columns ("sublines"). Each subline gets
    /// a threshold past its largest term start, past every explicit block on
    /// it and past every block where a non-parallel term crosses it. Terms are
    /// advanced to the threshold, the skipped blocks become explicit, terms
    /// with equal placement are merged and zero data is dropped.
    ///
    /// Afterwards distinct terms have disjoint supports and no term meets an
    /// explicit block, so the result is empty exactly when the matrix is zero.
    pub fn canonicalize(&self) -> Result<StructuredMatrix> {
        let mut lines: BTreeMap<LineKey, Vec<PatternTerm>> = BTreeMap::new();
        for t in &self.patterns {
            lines.entry(line_of(t)).or_default().push(*t);
        }

        let mut line_steps: BTreeMap<LineKey, u64> = BTreeMap::new();
        let mut sublines: BTreeMap<(LineKey, u64), Vec<PatternTerm>> = BTreeMap::new();
        for (key, terms) in &lines {
            let mut step = 1u64;
            for t in terms {
                step = lcm(step, t.col_step())?;
            }
            line_steps.insert(*key, step);
            for t in terms {
                for r in t.refine(step / t.col_step())? {
                    sublines.entry((*key, r.col_start() % step)).or_default().push(r);
                }
            }
        }

        let mut thresholds: BTreeMap<(LineKey, u64), u64> = sublines
            .iter()
            .map(|(sub, terms)| (*sub, terms.iter().map(PatternTerm::col_start).max().unwrap_or(0)))
            .collect();
        let mut bump = |key: LineKey, col: u64| -> Result<()> {
            if let Some(&step) = line_steps.get(&key) {
                if let Some(th) = thresholds.get_mut(&(key, col % step)) {
                    *th = (*th).max(col.ck_add(1, "canonical threshold")?);
                }
            }
            Ok(())
        };

        let directions: BTreeSet<(u64, u64)> = lines.keys().map(|&(dr, dc, _)| (dr, dc)).collect();
        for idx in self.explicit.keys() {
            for &(dr, dc) in &directions {
                let offset = idx.row as i128 * dc as i128 - idx.col as i128 * dr as i128;
                bump((dr, dc, offset), idx.col)?;
            }
        }
        for (i, t) in self.patterns.iter().enumerate() {
            for u in &self.patterns[i + 1..] {
                if let Some((_, col)) = t.crossing(u) {
                    bump(line_of(t), col)?;
                    bump(line_of(u), col)?;
                }
            }
        }

        let mut out = StructuredMatrix { k: self.k, explicit: self.explicit.clone(), patterns: Vec::new() };
        for (sub, terms) in sublines {
            let threshold = thresholds[&sub];
            let mut merged: Option<PatternTerm> = None;
            let mut coeff = 0i64;
            for t in terms {
                let skip = threshold.saturating_sub(t.col_start()).div_ceil(t.col_step());
                for s in 0..skip {
                    let (row, col) = t.position(s)?;
                    out.add_scalar_block(BlockIndex { row, col }, t.coeff())?;
                }
                let t = t.advance(skip)?;
                debug_assert!(merged.is_none_or(|m| m.key() == t.key()));
                merged = Some(t);
                coeff = coeff.ck_add(t.coeff(), "coefficient merge")?;
            }
            if let Some(t) = merged.and_then(|t| t.with_coeff(coeff)) {
                out.patterns.push(t);
            }
        }
        out.patterns.sort_by_key(PatternTerm::key);
        out.prune_zero_blocks();
        Ok(out)
    }

    /// Decides equality of the represented matrices.
    pub fn equals(&self, other: &StructuredMatrix) -> Result<bool> {
        self.check_same_k(other)?;
        self.sub(other)?.is_zero()
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.canonicalize()?.is_empty())
    }

    /// Checks the structural invariants: block shapes follow the partition and
    /// every stored term is well formed.
    pub fn validate(&self) -> Result<()> {
        check_k(self.k)?;
        for (idx, b) in &self.explicit {
            BlockIndex::new(idx.row, idx.col)?;
            if b.shape() != self.expected_shape(*idx) {
                return Err(Error::Shape(format!("block ({}, {}) has shape {:?}", idx.row, idx.col, b.shape())));
            }
        }
        for t in &self.patterns {
            PatternTerm::new(t.col_start(), t.col_step(), t.row_start(), t.row_step(), t.coeff())?;
        }
        Ok(())
    }
}

impl fmt::Display for StructuredMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k = {}", self.k)?;
        for (idx, b) in &self.explicit {
            writeln!(f, "  block ({}, {}) = {}", idx.row, idx.col, b)?;
        }
        for t in &self.patterns {
            writeln!(f, "  {t}")?;
        }
        Ok(())
    }
}
