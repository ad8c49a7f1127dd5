use thiserror::Error;

use crate::witness::Obstruction;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("block size parameter must be at least 1, got {0}")]
    InvalidBlockSize(u64),

    #[error("block size parameters differ: {0} vs {1}")]
    MismatchedBlockSize(u64, u64),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("integer overflow during {0}")]
    Overflow(&'static str),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("rewrite budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("malformed document: {0}")]
    Document(String),

    #[error("no witness exists: {0}")]
    Obstructed(Obstruction),

    #[error("internal validation failed: {0}")]
    Validation(String),
}

pub(crate) trait CheckedExt: Sized {
    fn ck_add(self, rhs: Self, what: &'static str) -> Result<Self>;
    fn ck_mul(self, rhs: Self, what: &'static str) -> Result<Self>;
}

macro_rules! impl_checked {
    ($($t:ty),*) => {$(
        impl CheckedExt for $t {
            #[inline]
            fn ck_add(self, rhs: Self, what: &'static str) -> Result<Self> {
                self.checked_add(rhs).ok_or(Error::Overflow(what))
            }
            #[inline]
            fn ck_mul(self, rhs: Self, what: &'static str) -> Result<Self> {
                self.checked_mul(rhs).ok_or(Error::Overflow(what))
            }
        }
    )*};
}

impl_checked!(i64, u64, i128);

pub(crate) fn to_u64(v: i128, what: &'static str) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::Overflow(what))
}
