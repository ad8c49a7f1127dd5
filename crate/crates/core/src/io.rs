//! JSON documents for matrices and witnesses, and the text format for
//! Leavitt-ring expressions.
//!
//! Integers up to `2^53 - 1` in magnitude are written as JSON numbers, larger
//! ones as decimal strings, so every value survives readers that parse numbers
//! as doubles. Both forms are accepted on input.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::PatternTerm;
use crate::blockmat::{BlockIndex, StructuredMatrix};
use crate::dense::Block;
use crate::error::{Error, Result};
use crate::leavitt::{Generator, NcPoly, RewriteBudget, Word};
use crate::ringmat::RingMatrix;
use crate::witness::WitnessPair;

const MAX_SAFE: i128 = (1 << 53) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Int(i128);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.abs() <= MAX_SAFE {
            s.serialize_i64(self.0 as i64)
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct IntVisitor;
        impl Visitor<'_> for IntVisitor {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Int, E> {
                Ok(Int(v as i128))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Int, E> {
                Ok(Int(v as i128))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Int, E> {
                let ok = !v.is_empty() && v.strip_prefix('-').unwrap_or(v).bytes().all(|b| b.is_ascii_digit());
                if !ok {
                    return Err(E::custom(format!("not a decimal integer: {v:?}")));
                }
                v.parse::<i128>().map(Int).map_err(|_| E::custom(format!("integer out of range: {v}")))
            }
        }
        d.deserialize_any(IntVisitor)
    }
}

impl Int {
    fn get<T: TryFrom<i128>>(self, what: &str) -> Result<T> {
        T::try_from(self.0).map_err(|_| Error::Document(format!("{what} out of range: {}", self.0)))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockDoc {
    m: Int,
    n: Int,
    entries: Vec<Vec<Int>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternDoc {
    a: Int,
    #[serde(rename = "L")]
    l: Int,
    b: Int,
    e: Int,
    c: Int,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    k: Int,
    blocks: Vec<BlockDoc>,
    patterns: Vec<PatternDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RingDoc {
    k: Int,
    rows: Int,
    cols: Int,
    entries: Vec<Vec<MatrixDoc>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessDoc {
    k: Int,
    m: Int,
    n: Int,
    steps: Int,
    x: RingDoc,
    y: RingDoc,
}

fn int<T: Into<i128>>(v: T) -> Int {
    Int(v.into())
}

fn usize_int(v: usize) -> Int {
    Int(v as i128)
}

impl MatrixDoc {
    fn from_matrix(a: &StructuredMatrix) -> MatrixDoc {
        let blocks = a
            .blocks()
            .map(|(idx, b)| BlockDoc {
                m: int(idx.row),
                n: int(idx.col),
                entries: b.to_rows().into_iter().map(|r| r.into_iter().map(int).collect()).collect(),
            })
            .collect();
        let mut terms = a.patterns().to_vec();
        terms.sort_by_key(|t| (t.key(), t.coeff()));
        let patterns = terms
            .iter()
            .map(|t| PatternDoc {
                a: int(t.col_start()),
                l: int(t.col_step()),
                b: int(t.row_start()),
                e: int(t.row_step()),
                c: int(t.coeff()),
            })
            .collect();
        MatrixDoc { k: int(a.k()), blocks, patterns }
    }

    fn into_matrix(self) -> Result<StructuredMatrix> {
        let k: u64 = self.k.get("k")?;
        let mut seen = BTreeSet::new();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for b in self.blocks {
            let idx = BlockIndex::new(b.m.get("block row")?, b.n.get("block column")?)?;
            if !seen.insert(idx) {
                return Err(Error::Document(format!("block ({}, {}) listed twice", idx.row, idx.col)));
            }
            let rows = b
                .entries
                .into_iter()
                .map(|r| r.into_iter().map(|v| v.get::<i64>("entry")).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            blocks.push((idx, Block::from_rows(rows)?));
        }
        let patterns = self
            .patterns
            .into_iter()
            .map(|p| PatternTerm::new(p.a.get("a")?, p.l.get("L")?, p.b.get("b")?, p.e.get("e")?, p.c.get("c")?))
            .collect::<Result<Vec<_>>>()?;
        let m = StructuredMatrix::from_parts(k, blocks, patterns)?;
        m.validate()?;
        Ok(m)
    }
}

impl RingDoc {
    fn from_ring(w: &RingMatrix) -> RingDoc {
        RingDoc {
            k: int(w.k()),
            rows: usize_int(w.rows()),
            cols: usize_int(w.cols()),
            entries: w.grid().map(|row| row.iter().map(MatrixDoc::from_matrix).collect()).collect(),
        }
    }

    fn into_ring(self) -> Result<RingMatrix> {
        let k: u64 = self.k.get("k")?;
        let rows: usize = self.rows.get("rows")?;
        let cols: usize = self.cols.get("cols")?;
        if self.entries.len() != rows || self.entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Document(format!("entry grid does not match the declared {rows}x{cols} shape")));
        }
        let entries = self.entries.into_iter().flatten().map(MatrixDoc::into_matrix).collect::<Result<Vec<_>>>()?;
        RingMatrix::from_entries(k, rows, cols, entries)
    }
}

fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    serde_json::to_string(doc).map_err(|e| Error::Document(e.to_string()))
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

/// Compact JSON with blocks sorted by `(m, n)` and terms by `(a, L, b, e)`.
/// Canonicalize first for a representation-independent encoding.
pub fn serialize_matrix(a: &StructuredMatrix) -> Result<String> {
    to_json(&MatrixDoc::from_matrix(a))
}

pub fn deserialize_matrix(text: &str) -> Result<StructuredMatrix> {
    from_json::<MatrixDoc>(text)?.into_matrix()
}

pub fn serialize_ring_matrix(w: &RingMatrix) -> Result<String> {
    to_json(&RingDoc::from_ring(w))
}

pub fn deserialize_ring_matrix(text: &str) -> Result<RingMatrix> {
    from_json::<RingDoc>(text)?.into_ring()
}

pub fn serialize_witness(w: &WitnessPair) -> Result<String> {
    to_json(&WitnessDoc {
        k: int(w.k()),
        m: usize_int(w.m()),
        n: usize_int(w.n()),
        steps: usize_int(w.steps()),
        x: RingDoc::from_ring(w.x()),
        y: RingDoc::from_ring(w.y()),
    })
}

/// Loads a witness without verifying it.
pub fn deserialize_witness(text: &str) -> Result<WitnessPair> {
    let doc: WitnessDoc = from_json(text)?;
    let steps: usize = doc.steps.get("steps")?;
    let w = WitnessPair::from_parts(
        doc.k.get("k")?,
        doc.m.get("m")?,
        doc.n.get("n")?,
        doc.x.into_ring()?,
        doc.y.into_ring()?,
    )?;
    if w.steps() != steps {
        return Err(Error::Document(format!("steps is {steps}, expected {}", w.steps())));
    }
    Ok(w)
}

/// Text accepted by [`parse_expr`].
pub fn print_expr(u: &NcPoly) -> String {
    u.to_string()
}

/// Parses an expression over `x_1..x_p, y_1..y_p`:
///
/// ```text
/// expr      := ['-'] term (('+' | '-') term)*
/// term      := factor ('*' factor)*
/// factor    := primary ('^' posint)*
/// primary   := integer | generator | '(' expr ')'
/// generator := ('x' | 'y') posint
/// ```
///
/// Whitespace between tokens is ignored. No relations are applied.
pub fn parse_expr(src: &str, p: u32) -> Result<NcPoly> {
    if p < 1 {
        return Err(Error::Invalid("number of generator pairs must be at least 1".into()));
    }
    let mut parser = Parser { src: src.as_bytes(), pos: 0, p };
    let u = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected input"));
    }
    Ok(u)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    p: u32,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        let found = match self.src.get(self.pos) {
            Some(&b) => format!("{message}, found {:?}", b as char),
            None => format!("{message}, found end of input"),
        };
        Error::Parse { offset: self.pos, message: found }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn check_size(&self, u: NcPoly, start: usize) -> Result<NcPoly> {
        let limit = RewriteBudget::default().max_terms;
        if u.len() > limit {
            return Err(Error::Parse {
                offset: start,
                message: format!("expression expands to more than {limit} terms"),
            });
        }
        Ok(u)
    }

    fn expr(&mut self) -> Result<NcPoly> {
        let start = self.pos;
        let negate = self.eat(b'-');
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg()?;
        }
        loop {
            if self.eat(b'+') {
                let t = self.term()?;
                acc = acc.add(&t)?;
            } else if self.eat(b'-') {
                let t = self.term()?;
                acc = acc.sub(&t)?;
            } else {
                return self.check_size(acc, start);
            }
        }
    }

    fn term(&mut self) -> Result<NcPoly> {
        let start = self.pos;
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let f = self.factor()?;
            acc = self.check_size(acc.mul(&f)?, start)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<NcPoly> {
        let start = self.pos;
        let mut acc = self.primary()?;
        while self.eat(b'^') {
            self.skip_ws();
            let e = self.posint("exponent")?;
            let base = acc.clone();
            for _ in 1..e {
                acc = self.check_size(acc.mul(&base)?, start)?;
            }
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<NcPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let u = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(u)
            }
            Some(c @ (b'x' | b'y')) => {
                let start = self.pos;
                self.pos += 1;
                let index = self.posint("generator index")?;
                if index > self.p {
                    return Err(Error::Parse {
                        offset: start,
                        message: format!("generator index {index} out of range [1, {}]", self.p),
                    });
                }
                let g = if c == b'x' { Generator::x(index) } else { Generator::y(index) };
                NcPoly::monomial(self.p, Word(vec![g]), 1)
            }
            Some(b'0'..=b'9') => {
                let (start, digits) = self.digits();
                let c: i64 = digits
                    .parse()
                    .map_err(|_| Error::Parse { offset: start, message: format!("integer {digits} is too large") })?;
                NcPoly::constant(self.p, c)
            }
            _ => Err(self.error("expected an integer, a generator or '('")),
        }
    }

    fn digits(&mut self) -> (usize, String) {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        (start, String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn posint(&mut self, what: &str) -> Result<u32> {
        let (start, digits) = self.digits();
        if digits.is_empty() {
            return Err(self.error(&format!("expected {what}")));
        }
        match digits.parse::<u32>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => {
                Err(Error::Parse { offset: start, message: format!("{what} must be a positive integer, got {digits}") })
            }
        }
    }
}
