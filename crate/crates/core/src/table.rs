//! The triangular table of Hankel determinants and its bookkeeping.
//!
//! Row `j` of the table holds `d(i, j)`, the determinant of the j-by-j Hankel
//! matrix anchored at column `i`, for `i` in `valid_cols(j, n)`. Rows 0 and 1
//! are the conventions `d(i, 0) = 1` and `d(i, 1) = x_i`. Each cell carries a
//! known/unset flag and, optionally, a tag recording which rule produced it.

use crate::field::FieldCtx;
use crate::{Error, Result};

/// A finite sequence over F_q. For q = 2 the symbols are additionally kept
/// bit-packed so Hankel rows can be sliced out of machine words.
#[derive(Debug, Clone)]
pub struct Sequence {
    ctx: FieldCtx,
    elems: Vec<u64>,
    bits: Vec<u64>,
}

impl Sequence {
    /// Builds a sequence, reducing every symbol into the field.
    pub fn from_symbols(ctx: FieldCtx, symbols: &[u64]) -> Result<Self> {
        if symbols.len() < 2 {
            return Err(Error::BadLength(format!(
                "sequence length {} < 2",
                symbols.len()
            )));
        }
        let elems: Vec<u64> = symbols.iter().map(|&s| ctx.reduce(s)).collect();
        let bits = if ctx.is_binary() {
            let mut bits = vec![0u64; elems.len().div_ceil(64)];
            for (i, &e) in elems.iter().enumerate() {
                bits[i / 64] |= e << (i % 64);
            }
            bits
        } else {
            Vec::new()
        };
        Ok(Sequence { ctx, elems, bits })
    }

    #[inline]
    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    #[inline]
    pub fn symbols(&self) -> &[u64] {
        &self.elems
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        self.elems[i]
    }

    /// Packed words, LSB-first; empty unless q = 2.
    #[inline]
    pub(crate) fn packed_bits(&self) -> &[u64] {
        &self.bits
    }
}

/// Inclusive column range of row `j` in a table over a length-`n` sequence.
pub fn valid_cols(j: usize, n: usize) -> Result<(usize, usize)> {
    let h = n.div_ceil(2);
    if j > h {
        return Err(Error::IndexOutOfRange { i: 0, j });
    }
    if j == 0 {
        Ok((0, n - 1))
    } else {
        Ok((j - 1, n - j))
    }
}

/// Number of cells the scan has to produce, i.e. the cells of rows 2..=h.
pub fn entry_count(n: usize) -> usize {
    let h = n.div_ceil(2);
    (2..=h).map(|j| n + 2 - 2 * j).sum()
}

/// Which rule produced a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchTag {
    /// Rows 0 and 1, written at initialization.
    Init,
    /// Written ahead by a zero-square fill.
    SquareFill,
    /// North-South-East-West condensation step.
    Nsew,
    /// Grid equation of radius k solved for the unknown.
    Grid(u8),
    /// Cross identity at singularity depth m.
    Cross(u32),
    /// Explicit Gaussian elimination.
    Direct,
}

/// Branch counters for one scan; keys mirror the per-cell tags.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BranchStats {
    pub nsew: u64,
    pub square_fill: u64,
    pub direct: u64,
    /// Indexed by radius; only 2..=7 are ever used.
    pub grid: [u64; 8],
    /// Keyed by the singularity depth m = j - j0.
    pub cross: std::collections::BTreeMap<u32, u64>,
}

impl BranchStats {
    pub fn record(&mut self, tag: BranchTag) {
        match tag {
            BranchTag::Nsew => self.nsew += 1,
            BranchTag::SquareFill => self.square_fill += 1,
            BranchTag::Direct => self.direct += 1,
            BranchTag::Grid(k) => self.grid[k as usize] += 1,
            BranchTag::Cross(m) => *self.cross.entry(m).or_insert(0) += 1,
            BranchTag::Init => {}
        }
    }

    pub fn record_n(&mut self, tag: BranchTag, count: u64) {
        match tag {
            BranchTag::SquareFill => self.square_fill += count,
            _ => {
                for _ in 0..count {
                    self.record(tag);
                }
            }
        }
    }

    pub fn merge(&mut self, other: &BranchStats) {
        self.nsew += other.nsew;
        self.square_fill += other.square_fill;
        self.direct += other.direct;
        for k in 0..8 {
            self.grid[k] += other.grid[k];
        }
        for (&m, &c) in &other.cross {
            *self.cross.entry(m).or_insert(0) += c;
        }
    }

    pub fn grid_total(&self) -> u64 {
        self.grid.iter().sum()
    }

    pub fn cross_total(&self) -> u64 {
        self.cross.values().sum()
    }

    /// Sum of every counter; equals `entry_count(n)` after a full scan.
    pub fn total(&self) -> u64 {
        self.nsew + self.square_fill + self.direct + self.grid_total() + self.cross_total()
    }
}

struct Row {
    offset: usize,
    values: Vec<u64>,
    known: Vec<u64>,
    tags: Option<Vec<BranchTag>>,
}

impl Row {
    fn new(lo: usize, hi: usize, with_tags: bool) -> Self {
        let width = hi - lo + 1;
        Row {
            offset: lo,
            values: vec![0; width],
            known: vec![0; width.div_ceil(64)],
            tags: with_tags.then(|| vec![BranchTag::Init; width]),
        }
    }

    #[inline]
    fn idx(&self, i: usize) -> usize {
        i - self.offset
    }

    #[inline]
    fn is_known(&self, i: usize) -> bool {
        let p = self.idx(i);
        self.known[p / 64] >> (p % 64) & 1 == 1
    }

    #[inline]
    fn mark(&mut self, i: usize) {
        let p = self.idx(i);
        self.known[p / 64] |= 1 << (p % 64);
    }
}

/// The triangular determinant table over a fixed sequence length and field.
pub struct DetTable {
    n: usize,
    q: u64,
    h: usize,
    rows: Vec<Row>,
}

/// State of one table cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Unset,
    Known(u64),
}

impl DetTable {
    /// Allocates the table and writes rows 0 and 1 from the sequence.
    pub fn init(x: &Sequence) -> Self {
        Self::init_with(x, true)
    }

    /// Same as [`DetTable::init`] but lets callers drop per-cell tags.
    pub fn init_with(x: &Sequence, collect_tags: bool) -> Self {
        let n = x.len();
        let h = n.div_ceil(2);
        let mut rows = Vec::with_capacity(h + 1);
        for j in 0..=h {
            let (lo, hi) = valid_cols(j, n).expect("j <= h");
            rows.push(Row::new(lo, hi, collect_tags));
        }
        let mut table = DetTable {
            n,
            q: x.ctx().modulus(),
            h,
            rows,
        };
        for i in 0..n {
            table.set(i, 0, 1, BranchTag::Init).expect("fresh row 0");
            table.set(i, 1, x.get(i), BranchTag::Init).expect("fresh row 1");
        }
        table
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> usize {
        self.h
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    #[inline]
    fn check(&self, i: usize, j: usize) -> Result<()> {
        if j > self.h {
            return Err(Error::IndexOutOfRange { i, j });
        }
        let row = &self.rows[j];
        if i < row.offset || i >= row.offset + row.values.len() {
            return Err(Error::IndexOutOfRange { i, j });
        }
        Ok(())
    }

    /// Checked cell read.
    pub fn get(&self, i: usize, j: usize) -> Result<Cell> {
        self.check(i, j)?;
        let row = &self.rows[j];
        if row.is_known(i) {
            Ok(Cell::Known(row.values[row.idx(i)]))
        } else {
            Ok(Cell::Unset)
        }
    }

    /// Unchecked value read for hot paths; the cell must be known.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> u64 {
        debug_assert!(self.check(i, j).is_ok() && self.rows[j].is_known(i));
        let row = &self.rows[j];
        row.values[row.idx(i)]
    }

    #[inline]
    pub fn is_known(&self, i: usize, j: usize) -> bool {
        let row = &self.rows[j];
        i >= row.offset && i < row.offset + row.values.len() && row.is_known(i)
    }

    /// One-shot write: a cell moves Unset -> Known exactly once. Re-writing
    /// the same value is a no-op; a different value is a `DoubleWrite`.
    pub fn set(&mut self, i: usize, j: usize, value: u64, tag: BranchTag) -> Result<()> {
        self.check(i, j)?;
        let row = &mut self.rows[j];
        let p = row.idx(i);
        if row.is_known(i) {
            let old = row.values[p];
            if old != value {
                return Err(Error::DoubleWrite { i, j, old, new: value });
            }
            return Ok(());
        }
        row.values[p] = value;
        if let Some(tags) = row.tags.as_mut() {
            tags[p] = tag;
        }
        row.mark(i);
        Ok(())
    }

    /// Tag of a known cell, when tags are collected.
    pub fn tag(&self, i: usize, j: usize) -> Option<BranchTag> {
        let row = &self.rows[j];
        row.tags.as_ref().map(|t| t[row.idx(i)])
    }

    /// Values of row `j` in column order, with the row's first column.
    pub fn row(&self, j: usize) -> (usize, &[u64]) {
        let row = &self.rows[j];
        (row.offset, &row.values)
    }

    /// True once every cell of every row is known.
    pub fn complete(&self) -> bool {
        self.rows
            .iter()
            .all(|r| (r.offset..r.offset + r.values.len()).all(|i| r.is_known(i)))
    }
}
