//! Exact arithmetic on arithmetic progressions of block indices and on the
//! affine scalar-block families ([`PatternTerm`]) built from them.
//!
//! Everything here is integer-only. Intermediate values are carried in
//! `i128` and narrowed back with explicit overflow checks.

use std::fmt;

use crate::error::{to_u64, CheckedExt, Error, Result};

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b)).ck_mul(b, "lcm")
}

/// The infinite set `{start + step*t : t >= 0}` of block indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Progression {
    start: u64,
    step: u64,
}

impl Progression {
    pub fn new(start: u64, step: u64) -> Result<Self> {
        if start < 1 || step < 1 {
            return Err(Error::Invalid(format!(
                "progression needs start >= 1 and step >= 1, got start {start} step {step}"
            )));
        }
        Ok(Progression { start, step })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// Position `t` of `x` in the progression, if `x` belongs to it.
    pub fn index_of(&self, x: u64) -> Option<u64> {
        if x < self.start {
            return None;
        }
        let d = x - self.start;
        d.is_multiple_of(self.step).then_some(d / self.step)
    }

    pub fn contains(&self, x: u64) -> bool {
        self.index_of(x).is_some()
    }

    pub fn nth(&self, t: u64) -> Result<u64> {
        self.step.ck_mul(t, "progression index")?.ck_add(self.start, "progression index")
    }

    /// Set intersection. Non-empty intersections are again progressions whose
    /// step is `lcm(self.step, other.step)`; `None` marks the empty set.
    pub fn intersect(&self, other: &Progression) -> Result<Option<Progression>> {
        let (s1, d1) = (self.start as i128, self.step as i128);
        let (s2, d2) = (other.start as i128, other.step as i128);
        let (g, inv, _) = ext_gcd(d1, d2);
        let diff = s2 - s1;
        if diff % g != 0 {
            return Ok(None);
        }
        // x = s1 + d1*u with d1*u = diff (mod d2)  =>  u = (diff/g)*inv (mod d2/g)
        let m = d2 / g;
        let u = ((diff / g).rem_euclid(m) as u128 * inv.rem_euclid(m) as u128 % m as u128) as i128;
        let step = d1.ck_mul(m, "progression intersection")?;
        let mut x = s1.ck_add(d1.ck_mul(u, "progression intersection")?, "progression intersection")?;
        let floor = s1.max(s2);
        if x < floor {
            let jumps = (floor - x + step - 1) / step;
            x = x.ck_add(jumps.ck_mul(step, "progression intersection")?, "progression intersection")?;
        }
        Ok(Some(Progression {
            start: to_u64(x, "progression intersection")?,
            step: to_u64(step, "progression intersection")?,
        }))
    }
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{} + {}t}}", self.start, self.step)
    }
}

/// One affine family of scalar blocks: for every `t >= 0` the block at block
/// row `row_start + row_step*t`, block column `col_start + col_step*t` equals
/// `coeff * I_k`.
///
/// Both starts are at least 2, so a term never touches the 1-wide border row
/// or column of the block partition. Rows and columns are both strictly
/// increasing in `t`, so every block row and block column meets a term at most
/// once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatternTerm {
    col_start: u64,
    col_step: u64,
    row_start: u64,
    row_step: u64,
    coeff: i64,
}

/// Placement of a term with the coefficient stripped, ordered as `(a, L, b, e)`.
pub type TermKey = (u64, u64, u64, u64);

impl PatternTerm {
    pub fn new(col_start: u64, col_step: u64, row_start: u64, row_step: u64, coeff: i64) -> Result<Self> {
        if col_start < 2 || row_start < 2 {
            return Err(Error::Invalid(format!(
                "pattern starts must be >= 2, got column start {col_start}, row start {row_start}"
            )));
        }
        if col_step < 1 || row_step < 1 {
            return Err(Error::Invalid(format!(
                "pattern steps must be >= 1, got column step {col_step}, row step {row_step}"
            )));
        }
        if coeff == 0 {
            return Err(Error::Invalid("pattern coefficient must be nonzero".into()));
        }
        Ok(PatternTerm { col_start, col_step, row_start, row_step, coeff })
    }

    /// The identity pattern `(2, 1, 2, 1, c)`: `c` times every diagonal block from 2 on.
    pub fn diagonal(coeff: i64) -> Result<Self> {
        PatternTerm::new(2, 1, 2, 1, coeff)
    }

    pub fn col_start(&self) -> u64 {
        self.col_start
    }
    pub fn col_step(&self) -> u64 {
        self.col_step
    }
    pub fn row_start(&self) -> u64 {
        self.row_start
    }
    pub fn row_step(&self) -> u64 {
        self.row_step
    }
    pub fn coeff(&self) -> i64 {
        self.coeff
    }

    pub fn key(&self) -> TermKey {
        (self.col_start, self.col_step, self.row_start, self.row_step)
    }

    pub fn cols(&self) -> Progression {
        Progression { start: self.col_start, step: self.col_step }
    }

    pub fn rows(&self) -> Progression {
        Progression { start: self.row_start, step: self.row_step }
    }

    /// Same placement, different coefficient. `None` when `coeff` is zero.
    pub fn with_coeff(&self, coeff: i64) -> Option<Self> {
        (coeff != 0).then_some(PatternTerm { coeff, ..*self })
    }

    /// Block position `(row, col)` of the `t`-th block.
    pub fn position(&self, t: u64) -> Result<(u64, u64)> {
        Ok((self.rows().nth(t)?, self.cols().nth(t)?))
    }

    /// Block column hit in block row `row`, if any.
    pub fn col_for_row(&self, row: u64) -> Option<u64> {
        let t = self.rows().index_of(row)?;
        self.cols().nth(t).ok()
    }

    /// Block row hit in block column `col`, if any.
    pub fn row_for_col(&self, col: u64) -> Option<u64> {
        let t = self.cols().index_of(col)?;
        self.rows().nth(t).ok()
    }

    pub fn transpose(&self) -> PatternTerm {
        PatternTerm {
            col_start: self.row_start,
            col_step: self.row_step,
            row_start: self.col_start,
            row_step: self.col_step,
            coeff: self.coeff,
        }
    }

    /// The term describing the matrix product `self * rhs`, or `None` when the
    /// product vanishes (the columns of `self` never meet the rows of `rhs`).
    pub fn compose(&self, rhs: &PatternTerm) -> Result<Option<PatternTerm>> {
        let Some(meet) = self.cols().intersect(&rhs.rows())? else {
            return Ok(None);
        };
        // meet = {p0 + M*u}; p0 = a1 + L1*s0 = b2 + e2*t0
        let s0 = (meet.start - self.col_start) / self.col_step;
        let t0 = (meet.start - rhs.row_start) / rhs.row_step;
        let s_step = meet.step / self.col_step;
        let t_step = meet.step / rhs.row_step;
        const W: &str = "pattern composition";
        Ok(Some(PatternTerm {
            row_start: self.row_step.ck_mul(s0, W)?.ck_add(self.row_start, W)?,
            row_step: self.row_step.ck_mul(s_step, W)?,
            col_start: rhs.col_step.ck_mul(t0, W)?.ck_add(rhs.col_start, W)?,
            col_step: rhs.col_step.ck_mul(t_step, W)?,
            coeff: self.coeff.ck_mul(rhs.coeff, W)?,
        }))
    }

    /// Splits the term into `factor` interleaved terms whose column step is
    /// `factor * col_step`. The union of their blocks is exactly the original.
    pub fn refine(&self, factor: u64) -> Result<Vec<PatternTerm>> {
        const W: &str = "pattern refinement";
        let col_step = self.col_step.ck_mul(factor, W)?;
        let row_step = self.row_step.ck_mul(factor, W)?;
        (0..factor)
            .map(|j| {
                Ok(PatternTerm {
                    col_start: self.col_step.ck_mul(j, W)?.ck_add(self.col_start, W)?,
                    col_step,
                    row_start: self.row_step.ck_mul(j, W)?.ck_add(self.row_start, W)?,
                    row_step,
                    coeff: self.coeff,
                })
            })
            .collect()
    }

    /// Drops the first `skip` blocks.
    pub fn advance(&self, skip: u64) -> Result<PatternTerm> {
        let (row_start, col_start) = self.position(skip)?;
        Ok(PatternTerm { row_start, col_start, ..*self })
    }

    /// Reduced direction `(row_step, col_step) / gcd`. Terms with equal
    /// directions are parallel; terms with different directions share at most
    /// one block.
    pub fn direction(&self) -> (u64, u64) {
        let g = gcd(self.row_step, self.col_step);
        (self.row_step / g, self.col_step / g)
    }

    /// Common block `(row, col)` of two non-parallel terms, if they share one.
    /// Returns `None` for parallel terms as well.
    pub fn crossing(&self, other: &PatternTerm) -> Option<(u64, u64)> {
        let (l1, e1) = (self.col_step as i128, self.row_step as i128);
        let (l2, e2) = (other.col_step as i128, other.row_step as i128);
        let da = other.col_start as i128 - self.col_start as i128;
        let db = other.row_start as i128 - self.row_start as i128;
        // l1*s - l2*t = da ; e1*s - e2*t = db
        let det = l2 * e1 - l1 * e2;
        if det == 0 {
            return None;
        }
        let s_num = l2 * db - e2 * da;
        let t_num = l1 * db - e1 * da;
        if s_num % det != 0 || t_num % det != 0 {
            return None;
        }
        let (s, t) = (s_num / det, t_num / det);
        if s < 0 || t < 0 {
            return None;
        }
        let row = self.row_start as i128 + e1 * s;
        let col = self.col_start as i128 + l1 * s;
        Some((u64::try_from(row).ok()?, u64::try_from(col).ok()?))
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}*I at (row {} + {}t, col {} + {}t)",
            self.coeff, self.row_start, self.row_step, self.col_start, self.col_step
        )
    }
}
