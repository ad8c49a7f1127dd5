use std::fmt;

use crate::error::{CheckedExt, Error, Result};

/// A dense integer matrix, stored row-major. Used for the finite blocks of a
/// [`StructuredMatrix`](crate::StructuredMatrix) and anywhere a small exact
/// matrix is needed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl Block {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Block { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn scalar(size: usize, c: i64) -> Self {
        let mut b = Block::zeros(size, size);
        for i in 0..size {
            b.entries[i * size + i] = c;
        }
        b
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows in dense matrix".into()));
        }
        Ok(Block { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.cols.max(1)).take(self.rows).map(<[i64]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    /// `Some(c)` when the block is square and equal to `c * I`.
    pub fn as_scalar(&self) -> Option<i64> {
        if self.rows != self.cols {
            return None;
        }
        let c = if self.rows == 0 { 0 } else { self.get(0, 0) };
        let ok = (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { c } else { 0 }));
        ok.then_some(c)
    }

    pub fn add_assign(&mut self, other: &Block) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a = a.ck_add(*b, "block addition")?;
        }
        Ok(())
    }

    /// `self += c * I` on a square block.
    pub fn add_scalar(&mut self, c: i64) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!("scalar added to non-square {}x{} block", self.rows, self.cols)));
        }
        for i in 0..self.rows {
            let idx = i * self.cols + i;
            self.entries[idx] = self.entries[idx].ck_add(c, "block addition")?;
        }
        Ok(())
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Block, c: i64) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a = a.ck_add(b.ck_mul(c, "block scaling")?, "block addition")?;
        }
        Ok(())
    }

    pub fn scaled(&self, c: i64) -> Result<Block> {
        let entries = self.entries.iter().map(|&v| v.ck_mul(c, "block scaling")).collect::<Result<_>>()?;
        Ok(Block { entries, ..*self })
    }

    pub fn neg(&self) -> Result<Block> {
        self.scaled(-1)
    }

    pub fn mul(&self, rhs: &Block) -> Result<Block> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Block::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for p in 0..self.cols {
                let a = self.get(i, p);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.entries[idx] =
                        out.entries[idx].ck_add(a.ck_mul(rhs.get(p, j), "block product")?, "block product")?;
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Block {
        let mut out = Block::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    /// Sum of the diagonal. Errors on non-square input.
    pub fn trace(&self) -> Result<i128> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!("trace of non-square {}x{} matrix", self.rows, self.cols)));
        }
        Ok((0..self.rows).map(|i| self.get(i, i) as i128).sum())
    }

    fn check_same_shape(&self, other: &Block) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(())
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.to_rows().iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(i64::to_string).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = Block::from_rows(vec![vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        let b = a.transpose();
        assert_eq!(a.mul(&b).unwrap().to_rows(), vec![vec![14, 32], vec![32, 77]]);
        assert!(a.mul(&a).is_err());
    }

    #[test]
    fn scalar_detection() {
        assert_eq!(Block::scalar(3, -2).as_scalar(), Some(-2));
        assert_eq!(Block::zeros(2, 2).as_scalar(), Some(0));
        assert_eq!(Block::zeros(1, 2).as_scalar(), None);
        let b = Block::from_rows(vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(b.as_scalar(), None);
    }

    #[test]
    fn overflow_is_an_error() {
        let a = Block::scalar(1, i64::MAX);
        assert!(matches!(a.mul(&Block::scalar(1, 2)), Err(Error::Overflow(_))));
        let mut b = a.clone();
        assert!(b.add_assign(&a).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Block::from_rows(vec![vec![1], vec![1, 2]]).is_err());
    }
}
