//! Traces with values in `Z/kZ` at three scales: finite integer blocks,
//! structured infinite matrices, and finite matrices over those.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, AddAssign};

use crate::blockmat::{check_k, StructuredMatrix};
use crate::dense::Block;
use crate::error::{Error, Result};
use crate::ringmat::RingMatrix;

/// A residue class modulo `modulus`, stored as its representative in `[0, modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: i128, modulus: u64) -> Result<Self> {
        check_k(modulus)?;
        Ok(Residue { value: value.rem_euclid(modulus as i128) as u64, modulus })
    }

    pub fn zero(modulus: u64) -> Result<Self> {
        Residue::new(0, modulus)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl Add for Residue {
    type Output = Residue;

    fn add(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "residues with different moduli");
        let v = (self.value as u128 + rhs.value as u128) % self.modulus as u128;
        Residue { value: v as u64, modulus: self.modulus }
    }
}

impl AddAssign for Residue {
    fn add_assign(&mut self, rhs: Residue) {
        *self = *self + rhs;
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// Sum of the diagonal of a square integer matrix, reduced mod `k`.
pub fn trace_mod_k(m: &Block, k: u64) -> Result<Residue> {
    Residue::new(m.trace()?, k)
}

/// Sum over all diagonal blocks `A^{n,n}` of their traces mod `k`.
///
/// Only finitely many diagonal blocks can carry a nonzero residue: those with
/// an explicit block, and those where a term crosses the diagonal at a single
/// block. A term lying along the diagonal consists of scalar `k x k` blocks,
/// each with trace `c*k = 0`, so it contributes nothing.
pub fn trace_structured(a: &StructuredMatrix) -> Result<Residue> {
    let k = a.k();
    let mut candidates: BTreeSet<u64> = a.blocks().filter(|(i, _)| i.row == i.col).map(|(i, _)| i.row).collect();
    for t in a.patterns() {
        if t.row_step() != t.col_step() {
            let (b, e) = (t.row_start() as i128, t.row_step() as i128);
            let (a0, l) = (t.col_start() as i128, t.col_step() as i128);
            // b + e*s = a0 + l*s
            let (num, den) = (a0 - b, e - l);
            if num % den == 0 && num / den >= 0 {
                let s = (num / den) as u64;
                if let Ok((row, _)) = t.position(s) {
                    candidates.insert(row);
                }
            }
        }
    }
    let mut total = Residue::zero(k)?;
    for n in candidates {
        total += trace_mod_k(&a.block_at(n, n)?, k)?;
    }
    Ok(total)
}

/// `sum_l T_k(W_{l,l})` for a square matrix `W` over the structured ring.
pub fn trace_ring_matrix(w: &RingMatrix) -> Result<Residue> {
    if w.rows() != w.cols() {
        return Err(Error::Shape(format!("trace of non-square {}x{} ring matrix", w.rows(), w.cols())));
    }
    let mut total = Residue::zero(w.k())?;
    for l in 0..w.rows() {
        total += trace_structured(w.get(l, l))?;
    }
    Ok(total)
}
