//! Determinants of every Hankel matrix extractable from a finite sequence
//! over a prime field, arranged into a triangular quotient-difference table.
//!
//! The table is filled either trivially (one Gaussian elimination per cell)
//! or by a dynamic-programming scan that replaces almost all eliminations by
//! local identities: forced squares of zeros, the North-South-East-West
//! condensation step, cross-shaped identities along column runs of zeros,
//! and small "grid" determinantal equations solved for the unknown cell.
//!
//! A second layer interprets long zero runs in the table as hidden
//! linear-feedback windows and recovers their generating vectors.
//!
//! ```
//! use hankel_scan::field::FieldCtx;
//! use hankel_scan::table::Sequence;
//! use hankel_scan::scan::{self, ScanOptions};
//!
//! let f2 = FieldCtx::new(2).unwrap();
//! let x = Sequence::from_symbols(f2, &[0, 1, 0, 1, 0, 1, 1, 0]).unwrap();
//! let report = scan::scan_accelerated(&x, &ScanOptions::default());
//! assert_eq!(report.stats.total(), hankel_scan::table::entry_count(8) as u64);
//! ```

pub mod dense;
pub mod field;
pub mod identities;
pub mod lfsr;
pub mod scan;
pub mod table;

use std::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The requested modulus is not a prime number.
    NotPrime(u64),
    /// Inversion (or a negative power) of the zero element.
    DivisionByZero,
    /// A cell or sequence index outside its valid range.
    IndexOutOfRange { i: usize, j: usize },
    /// Attempt to overwrite an already-known table cell with a different value.
    DoubleWrite { i: usize, j: usize, old: u64, new: u64 },
    /// Two tables with different length or modulus were compared.
    ShapeMismatch,
    /// The flank Hankel system for generator recovery is singular.
    SingularSystem,
    /// Generator recovery was asked for without a detected square.
    NoSquare,
    /// An instance generator was called with an unusable length.
    BadLength(String),
    /// A prefix of the wrong length was passed to the linear extender.
    LengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(q) => write!(f, "{q} is not prime"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::IndexOutOfRange { i, j } => write!(f, "cell ({i}, {j}) out of range"),
            Error::DoubleWrite { i, j, old, new } => {
                write!(f, "cell ({i}, {j}) already holds {old}, refusing to write {new}")
            }
            Error::ShapeMismatch => write!(f, "tables have different length or modulus"),
            Error::SingularSystem => write!(f, "flank Hankel system is singular"),
            Error::NoSquare => write!(f, "no zero square to recover from"),
            Error::BadLength(msg) => write!(f, "bad length: {msg}"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "prefix length {got}, expected {expected}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
