//! The Leavitt ring `L_p`: integer polynomials in noncommuting
//! `x_1..x_p, y_1..y_p` modulo `sum_i x_i y_i - 1` and `y_i x_j - delta_ij`.
//!
//! Normal forms come from the oriented rules
//!
//! ```text
//! y_i x_j  ->  delta_ij
//! x_p y_p  ->  1 - sum_{i<p} x_i y_i
//! ```
//!
//! applied until no word contains `y_i x_j` or `x_p y_p`.
//! [`LeavittHom`] is the ring map `L_p -> R_{p-1}` sending `x_i` and `y_i`
//! to the selection matrices of the `(p-1)`-split isomorphism and its
//! inverse.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::blockmat::StructuredMatrix;
use crate::error::{CheckedExt, Error, Result};
use crate::witness::split_iso;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X,
    Y,
}

/// `x_index` or `y_index`. Ordered `x_1 < ... < x_p < y_1 < ... < y_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub letter: Letter,
    pub index: u32,
}

impl Generator {
    pub fn x(index: u32) -> Self {
        Generator { letter: Letter::X, index }
    }

    pub fn y(index: u32) -> Self {
        Generator { letter: Letter::Y, index }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.letter {
            Letter::X => 'x',
            Letter::Y => 'y',
        };
        write!(f, "{c}{}", self.index)
    }
}

/// A monomial. Words compare by length first, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Generator>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Positions `i` where `w[i] w[i+1]` is the left side of a rule.
    fn redexes(&self, p: u32) -> impl Iterator<Item = usize> + '_ {
        self.0.windows(2).enumerate().filter_map(move |(i, pair)| is_redex(pair[0], pair[1], p).then_some(i))
    }

    /// True when no rule applies.
    pub fn is_normal(&self, p: u32) -> bool {
        self.redexes(p).next().is_none()
    }
}

fn is_redex(a: Generator, b: Generator, p: u32) -> bool {
    match (a.letter, b.letter) {
        (Letter::Y, Letter::X) => true,
        (Letter::X, Letter::Y) => a.index == p && b.index == p,
        _ => false,
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(Generator::to_string).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Element of the free algebra `Z<x_1..x_p, y_1..y_p>`, no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NcPoly {
    p: u32,
    terms: BTreeMap<Word, i64>,
}

impl NcPoly {
    pub fn zero(p: u32) -> Result<Self> {
        if p < 1 {
            return Err(Error::Invalid("number of generator pairs must be at least 1".into()));
        }
        Ok(NcPoly { p, terms: BTreeMap::new() })
    }

    pub fn constant(p: u32, c: i64) -> Result<Self> {
        NcPoly::monomial(p, Word::empty(), c)
    }

    pub fn one(p: u32) -> Result<Self> {
        NcPoly::constant(p, 1)
    }

    pub fn generator(p: u32, g: Generator) -> Result<Self> {
        NcPoly::monomial(p, Word(vec![g]), 1)
    }

    pub fn monomial(p: u32, word: Word, c: i64) -> Result<Self> {
        let mut poly = NcPoly::zero(p)?;
        if let Some(g) = word.0.iter().find(|g| g.index < 1 || g.index > p) {
            return Err(Error::IndexOutOfRange(format!("generator {g} with p = {p}")));
        }
        if c != 0 {
            poly.terms.insert(word, c);
        }
        Ok(poly)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same_p(&self, other: &NcPoly) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Invalid(format!("generator counts differ: p = {} vs p = {}", self.p, other.p)));
        }
        Ok(())
    }

    fn accumulate(terms: &mut BTreeMap<Word, i64>, word: Word, c: i64) -> Result<()> {
        let slot = terms.entry(word).or_insert(0);
        *slot = slot.ck_add(c, "polynomial coefficient")?;
        Ok(())
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_same_p(other)?;
        let mut terms = self.terms.clone();
        for (w, &c) in &other.terms {
            NcPoly::accumulate(&mut terms, w.clone(), c)?;
        }
        terms.retain(|_, c| *c != 0);
        Ok(NcPoly { p: self.p, terms })
    }

    pub fn scale(&self, c: i64) -> Result<NcPoly> {
        let mut terms = BTreeMap::new();
        if c != 0 {
            for (w, &v) in &self.terms {
                terms.insert(w.clone(), v.ck_mul(c, "polynomial coefficient")?);
            }
        }
        Ok(NcPoly { p: self.p, terms })
    }

    pub fn neg(&self) -> Result<NcPoly> {
        self.scale(-1)
    }

    pub fn sub(&self, other: &NcPoly) -> Result<NcPoly> {
        self.add(&other.neg()?)
    }

    /// Product in the free algebra; no rewriting.
    pub fn mul(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_same_p(other)?;
        let mut terms = BTreeMap::new();
        for (u, &a) in &self.terms {
            for (v, &b) in &other.terms {
                NcPoly::accumulate(&mut terms, u.concat(v), a.ck_mul(b, "polynomial coefficient")?)?;
            }
        }
        terms.retain(|_, c| *c != 0);
        Ok(NcPoly { p: self.p, terms })
    }

    pub fn pow(&self, e: u32) -> Result<NcPoly> {
        let mut acc = NcPoly::one(self.p)?;
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// True when every word is in normal form.
    pub fn is_normal(&self) -> bool {
        self.terms.keys().all(|w| w.is_normal(self.p))
    }
}

impl fmt::Display for NcPoly {
    /// Prints in the expression grammar accepted by [`crate::io::parse_expr`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, &c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c < 0 { ("-", c.unsigned_abs()) } else { ("+", c as u64) };
            match (i, sign) {
                (0, "+") => {}
                (0, _) => write!(f, "-")?,
                _ => write!(f, " {sign} ")?,
            }
            match (mag, w.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (1, false) => write!(f, "{w}")?,
                _ => write!(f, "{mag}*{w}")?,
            }
        }
        Ok(())
    }
}

/// Which redex to rewrite first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Leftmost,
    Rightmost,
}

/// Resource limits for rewriting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewriteBudget {
    /// Largest number of live terms (pending plus finished).
    pub max_terms: usize,
    pub max_word_len: usize,
}

impl Default for RewriteBudget {
    fn default() -> Self {
        RewriteBudget { max_terms: 10_000, max_word_len: 64 }
    }
}

pub fn normal_form(u: &NcPoly) -> Result<NcPoly> {
    normal_form_with(u, Strategy::Leftmost, RewriteBudget::default())
}

/// Rewrites every word until no rule applies.
///
/// Each step either shortens a word or replaces `x_p y_p` by smaller words of
/// the same length, so the process terminates; the budget bounds the
/// intermediate blow-up.
pub fn normal_form_with(u: &NcPoly, strategy: Strategy, budget: RewriteBudget) -> Result<NcPoly> {
    let p = u.p;
    let mut pending: BTreeMap<Word, i64> = u.terms.clone();
    let mut done: BTreeMap<Word, i64> = BTreeMap::new();
    while let Some((word, c)) = pending.pop_last() {
        if c == 0 {
            continue;
        }
        if word.len() > budget.max_word_len {
            return Err(Error::BudgetExceeded(format!(
                "word of length {} exceeds the limit of {}",
                word.len(),
                budget.max_word_len
            )));
        }
        let site = match strategy {
            Strategy::Leftmost => word.redexes(p).next(),
            Strategy::Rightmost => word.redexes(p).last(),
        };
        let Some(i) = site else {
            NcPoly::accumulate(&mut done, word, c)?;
            continue;
        };
        let (a, b) = (word.0[i], word.0[i + 1]);
        let splice = |middle: &[Generator]| {
            let mut v = Vec::with_capacity(word.len());
            v.extend_from_slice(&word.0[..i]);
            v.extend_from_slice(middle);
            v.extend_from_slice(&word.0[i + 2..]);
            Word(v)
        };
        match a.letter {
            Letter::Y => {
                if a.index == b.index {
                    NcPoly::accumulate(&mut pending, splice(&[]), c)?;
                }
            }
            Letter::X => {
                NcPoly::accumulate(&mut pending, splice(&[]), c)?;
                for j in 1..p {
                    NcPoly::accumulate(&mut pending, splice(&[Generator::x(j), Generator::y(j)]), -c)?;
                }
            }
        }
        if pending.len() + done.len() > budget.max_terms {
            return Err(Error::BudgetExceeded(format!("more than {} terms during rewriting", budget.max_terms)));
        }
    }
    done.retain(|_, c| *c != 0);
    Ok(NcPoly { p, terms: done })
}

/// The homomorphism `L_p -> R_{p-1}`, `x_i -> X_i`, `y_i -> Y_i`.
#[derive(Debug, Clone)]
pub struct LeavittHom {
    p: u32,
    xs: Vec<StructuredMatrix>,
    ys: Vec<StructuredMatrix>,
}

/// Builds the generator images and checks the defining relations before
/// returning.
pub fn leavitt_generators(p: u32) -> Result<LeavittHom> {
    if p < 2 {
        return Err(Error::Invalid(format!("the map into R_(p-1) needs p >= 2, got p = {p}")));
    }
    let k = (p - 1) as u64;
    let iso = split_iso(k)?;
    let hom = LeavittHom {
        p,
        xs: (0..p as usize).map(|i| iso.x.get(0, i).clone()).collect(),
        ys: (0..p as usize).map(|i| iso.y.get(i, 0).clone()).collect(),
    };
    let id = StructuredMatrix::identity(k)?;
    let zero = StructuredMatrix::zero(k)?;
    let mut sum = zero.clone();
    for (xi, yi) in hom.xs.iter().zip(&hom.ys) {
        sum = sum.add(&xi.mul(yi)?)?;
    }
    if !sum.equals(&id)? {
        return Err(Error::Validation(format!("sum of x_i y_i images is not the identity for p = {p}")));
    }
    for (i, yi) in hom.ys.iter().enumerate() {
        for (j, xj) in hom.xs.iter().enumerate() {
            let want = if i == j { &id } else { &zero };
            if !yi.mul(xj)?.equals(want)? {
                return Err(Error::Validation(format!("image of y{} x{} is wrong for p = {p}", i + 1, j + 1)));
            }
        }
    }
    Ok(hom)
}

impl LeavittHom {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u64 {
        (self.p - 1) as u64
    }

    pub fn image(&self, g: Generator) -> Result<&StructuredMatrix> {
        if g.index < 1 || g.index > self.p {
            return Err(Error::IndexOutOfRange(format!("generator {g} with p = {}", self.p)));
        }
        let i = (g.index - 1) as usize;
        Ok(match g.letter {
            Letter::X => &self.xs[i],
            Letter::Y => &self.ys[i],
        })
    }

    pub fn eval_word(&self, w: &Word) -> Result<StructuredMatrix> {
        let mut acc = StructuredMatrix::identity(self.k())?;
        for &g in w.letters() {
            acc = acc.mul(self.image(g)?)?;
        }
        acc.canonicalize()
    }

    /// Image of `u`, canonicalized.
    pub fn eval(&self, u: &NcPoly) -> Result<StructuredMatrix> {
        if u.p != self.p {
            return Err(Error::Invalid(format!("polynomial has p = {}, map has p = {}", u.p, self.p)));
        }
        let mut acc = StructuredMatrix::zero(self.k())?;
        for (w, c) in u.terms() {
            acc = acc.add(&self.eval_word(w)?.scale(c)?)?;
        }
        acc.canonicalize()
    }
}
