//! Finite matrices whose entries are structured infinite matrices.

use crate::blockmat::{check_k, StructuredMatrix};
use crate::error::{Error, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMatrix {
    k: u64,
    rows: usize,
    cols: usize,
    entries: Vec<StructuredMatrix>,
}

impl RingMatrix {
    /// Builds a matrix from row-major entries, all sharing `k`.
    pub fn from_entries(k: u64, rows: usize, cols: usize, entries: Vec<StructuredMatrix>) -> Result<Self> {
        check_k(k)?;
        if rows < 1 || cols < 1 {
            return Err(Error::Shape(format!("ring matrix must be at least 1x1, got {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} ring matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| e.k() != k) {
            return Err(Error::MismatchedBlockSize(k, e.k()));
        }
        Ok(RingMatrix { k, rows, cols, entries })
    }

    pub fn zeros(k: u64, rows: usize, cols: usize) -> Result<Self> {
        let zero = StructuredMatrix::zero(k)?;
        RingMatrix::from_entries(k, rows, cols, vec![zero; rows * cols])
    }

    pub fn identity(k: u64, d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::Shape("identity dimension must be at least 1".into()));
        }
        let mut m = RingMatrix::zeros(k, d, d)?;
        let id = StructuredMatrix::identity(k)?;
        for i in 0..d {
            m.entries[i * d + i] = id.clone();
        }
        Ok(m)
    }

    pub fn k(&self) -> u64 {
        self.k
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> &StructuredMatrix {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: StructuredMatrix) -> Result<()> {
        if value.k() != self.k {
            return Err(Error::MismatchedBlockSize(self.k, value.k()));
        }
        if i >= self.rows || j >= self.cols {
            return Err(Error::IndexOutOfRange(format!("({i}, {j}) in {}x{} ring matrix", self.rows, self.cols)));
        }
        self.entries[i * self.cols + j] = value;
        Ok(())
    }

    pub fn entries(&self) -> &[StructuredMatrix] {
        &self.entries
    }

    /// Rows of entries, for serialization.
    pub fn grid(&self) -> impl Iterator<Item = &[StructuredMatrix]> {
        self.entries.chunks(self.cols)
    }

    pub fn mul(&self, rhs: &RingMatrix) -> Result<RingMatrix> {
        self.mul_with(rhs, Execution::default())
    }

    /// Product with each output entry canonicalized. Output entries are
    /// independent and are evaluated according to `exec`.
    pub fn mul_with(&self, rhs: &RingMatrix, exec: Execution) -> Result<RingMatrix> {
        if self.k != rhs.k {
            return Err(Error::MismatchedBlockSize(self.k, rhs.k));
        }
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let (rows, cols, inner) = (self.rows, rhs.cols, self.cols);
        let entries = exec
            .map_range(rows * cols, |idx| {
                let (i, j) = (idx / cols, idx % cols);
                let mut acc = StructuredMatrix::zero(self.k)?;
                for p in 0..inner {
                    let (a, b) = (self.get(i, p), rhs.get(p, j));
                    if a.is_empty() || b.is_empty() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b)?)?;
                }
                acc.canonicalize()
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        RingMatrix::from_entries(self.k, rows, cols, entries)
    }

    pub fn add(&self, rhs: &RingMatrix) -> Result<RingMatrix> {
        self.check_same_shape(rhs)?;
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        RingMatrix::from_entries(self.k, self.rows, self.cols, entries)
    }

    pub fn equals(&self, rhs: &RingMatrix) -> Result<bool> {
        Ok(self.first_difference(rhs)?.is_none())
    }

    /// First entry `(i, j)` (row-major) where the two matrices differ.
    pub fn first_difference(&self, rhs: &RingMatrix) -> Result<Option<(usize, usize)>> {
        self.check_same_shape(rhs)?;
        for (idx, (a, b)) in self.entries.iter().zip(&rhs.entries).enumerate() {
            if !a.equals(b)? {
                return Ok(Some((idx / self.cols, idx % self.cols)));
            }
        }
        Ok(None)
    }

    pub fn canonicalize(&self) -> Result<RingMatrix> {
        let entries = self.entries.iter().map(StructuredMatrix::canonicalize).collect::<Result<_>>()?;
        RingMatrix::from_entries(self.k, self.rows, self.cols, entries)
    }

    fn check_same_shape(&self, rhs: &RingMatrix) -> Result<()> {
        if self.k != rhs.k {
            return Err(Error::MismatchedBlockSize(self.k, rhs.k));
        }
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Shape(format!("{}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        Ok(())
    }
}
