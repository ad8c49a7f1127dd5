//! Exact witnesses for the failure of invariant basis number.
//!
//! The ring `R_k` consists of integer `N x N` matrices with finitely many
//! nonzero entries in every row and column whose `k x k` blocks are scalar
//! except for finitely many. This crate computes in the subring generated by
//! finitely supported matrices and affine families of scalar blocks
//! ([`StructuredMatrix`]), which is enough to
//!
//! * build explicit pairs `X`, `Y` with `XY = I_m`, `YX = I_n` whenever
//!   `m = n (mod k)` ([`witness_pair`]),
//! * evaluate the `Z/kZ`-valued trace that forbids such pairs otherwise
//!   ([`trace_ring_matrix`], [`obstruction`]),
//! * rewrite elements of the Leavitt ring `L_p` to normal form and map them
//!   into `R_{p-1}` ([`leavitt`]).

pub mod arith;
pub mod blockmat;
pub mod dense;
pub mod error;
pub mod exec;
pub mod io;
pub mod leavitt;
pub mod modtrace;
pub mod ringmat;
pub mod witness;

pub use arith::{PatternTerm, Progression};
pub use blockmat::{BlockIndex, StructuredMatrix};
pub use dense::Block;
pub use error::{Error, Result};
pub use exec::Execution;
pub use leavitt::{normal_form, Generator, LeavittHom, NcPoly, Word};
pub use modtrace::{trace_mod_k, trace_ring_matrix, trace_structured, Residue};
pub use ringmat::RingMatrix;
pub use witness::{
    certify, obstruction, split_apply, split_iso, verify_witness, witness_pair, Certificate, Obstruction,
    VerificationReport, WitnessPair,
};
