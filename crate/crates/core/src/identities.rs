//! Determinant-avoidance rules for the sweep.
//!
//! Four ways to obtain `d(i, j)` without eliminating a j-by-j matrix:
//!
//! * zero squares: a run of zeros on a row, flanked by nonzero cells and
//!   covered by a nonzero row above, forces an equally wide block of zeros
//!   on the following rows (clipped by the triangle edges);
//! * the North-South-East-West step, a Dodgson condensation instance
//!   relating a cell to its four neighbours;
//! * the cross identity, expressing a cell below a column run of zeros from
//!   a horizontal window of the run's top row and a vertical pivot;
//! * grid equations: the determinant of a small diamond-shaped neighbourhood
//!   matrix vanishes, and the unknown cell is solved from that equation
//!   (conjectural, so the scan can cross-check it against the oracle).

use crate::dense::{det_in_place, gf2_det_packed, DenseMatrix};
use crate::field::FieldCtx;
use crate::table::{valid_cols, BranchTag, DetTable};
use crate::{Error, Result};

/// A rectangular block of forced zeros, clipped by the triangle edges.
///
/// Columns `a..=b` are zero on rows `j0..=j1` wherever those cells exist;
/// `j1 = j0 + (b - a)`. The flanks `a - 1` and `b + 1` on row `j0` are the
/// nonzero cells that bounded the detected run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroSquare {
    pub a: usize,
    pub b: usize,
    pub j0: usize,
    pub j1: usize,
}

impl ZeroSquare {
    pub fn new(a: usize, b: usize, j0: usize) -> Self {
        ZeroSquare { a, b, j0, j1: j0 + (b - a) }
    }

    /// Length of the zero run on the top row.
    pub fn run_len(&self) -> usize {
        self.b - self.a + 1
    }

    /// Column span of the block on row `r`, if any.
    pub fn cols_at(&self, r: usize, n: usize) -> Option<(usize, usize)> {
        if r < self.j0 || r > self.j1 {
            return None;
        }
        let (lo, hi) = valid_cols(r, n).ok()?;
        let a = self.a.max(lo);
        let b = self.b.min(hi);
        (a <= b).then_some((a, b))
    }

    /// True when `run` on row `row` lies inside this block's clipped span.
    pub fn covers_run(&self, row: usize, run: (usize, usize), n: usize) -> bool {
        match self.cols_at(row, n) {
            Some((a, b)) => a <= run.0 && run.1 <= b,
            None => false,
        }
    }
}

/// Maximal zero runs of row `j - 1` that qualify as square tops: both flanks
/// exist in range and are nonzero, and the covering row `j - 2` is nonzero
/// across the run and its flanks. Runs touching the slanted triangle edges
/// are not emitted here; they carry no in-range flank and are handled by the
/// edge-window path. Runs already inside `registered` squares are skipped.
pub fn find_zero_squares(table: &DetTable, j: usize, registered: &[ZeroSquare]) -> Vec<ZeroSquare> {
    debug_assert!(j >= 2);
    let n = table.n();
    let row = j - 1;
    let cover = j - 2;
    let (lo, hi) = valid_cols(row, n).expect("row in range");
    let (clo, chi) = valid_cols(cover, n).expect("cover in range");
    let mut squares = Vec::new();
    let mut i = lo;
    while i <= hi {
        if table.value(i, row) != 0 {
            i += 1;
            continue;
        }
        let a = i;
        while i < hi && table.value(i + 1, row) == 0 {
            i += 1;
        }
        let b = i;
        i += 1;
        if a == lo || b == hi {
            continue; // no in-range flank on that side
        }
        if table.value(a - 1, row) == 0 || table.value(b + 1, row) == 0 {
            continue; // unreachable for maximal runs, kept for clarity
        }
        if registered.iter().any(|sq| sq.covers_run(row, (a, b), n)) {
            continue;
        }
        let c_lo = (a - 1).max(clo);
        let c_hi = (b + 1).min(chi);
        if (c_lo..=c_hi).all(|c| table.value(c, cover) != 0) {
            squares.push(ZeroSquare::new(a, b, row));
        }
    }
    squares
}

/// A maximal zero run of row `j0` touching exactly one slanted edge.
/// These are square candidates only after their generating window has been
/// verified against the sequence itself (see the lfsr module).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRun {
    pub a: usize,
    pub b: usize,
    pub j0: usize,
    pub touches_left: bool,
    pub touches_right: bool,
}

/// Maximal zero runs of row `j - 1` that touch a triangle edge and are at
/// least `min_len` long, skipping runs inside already-registered squares.
pub fn find_edge_runs(
    table: &DetTable,
    j: usize,
    min_len: usize,
    registered: &[ZeroSquare],
) -> Vec<EdgeRun> {
    debug_assert!(j >= 2);
    let n = table.n();
    let row = j - 1;
    let (lo, hi) = valid_cols(row, n).expect("row in range");
    let mut runs = Vec::new();
    let mut i = lo;
    while i <= hi {
        if table.value(i, row) != 0 {
            i += 1;
            continue;
        }
        let a = i;
        while i < hi && table.value(i + 1, row) == 0 {
            i += 1;
        }
        let b = i;
        i += 1;
        let touches_left = a == lo;
        let touches_right = b == hi;
        if !(touches_left || touches_right) || b - a + 1 < min_len {
            continue;
        }
        if registered.iter().any(|sq| sq.covers_run(row, (a, b), n)) {
            continue;
        }
        runs.push(EdgeRun { a, b, j0: row, touches_left, touches_right });
    }
    runs
}

/// Writes the block's zeros on rows `from_row..j1` (clipped), skipping cells
/// already known to be zero. The block's bottom row `j1` is deliberately left
/// to the regular sweep: its cells are recovered by the per-cell identities,
/// which keeps the branch accounting aligned with how the fill counters are
/// reported. A known nonzero cell inside the region signals a logic bug and
/// aborts with `DoubleWrite`. Returns the number of cells actually written.
pub fn fill_zero_square(table: &mut DetTable, sq: &ZeroSquare, from_row: usize) -> Result<u64> {
    let n = table.n();
    let h = table.h();
    let mut written = 0u64;
    if sq.j1 == sq.j0 {
        return Ok(0);
    }
    for r in from_row.max(sq.j0)..=(sq.j1 - 1).min(h) {
        let Some((a, b)) = sq.cols_at(r, n) else { continue };
        for i in a..=b {
            if table.is_known(i, r) {
                if table.value(i, r) != 0 {
                    return Err(Error::DoubleWrite { i, j: r, old: table.value(i, r), new: 0 });
                }
                continue;
            }
            table.set(i, r, 0, BranchTag::SquareFill)?;
            written += 1;
        }
    }
    Ok(written)
}

/// One condensation step: `d(i,j) = (d(i,j-1)^2 - d(i+1,j-1) d(i-1,j-1)) / d(i,j-2)`,
/// applicable whenever the divisor is nonzero. The three row-(j-1) neighbours
/// are always in range for a valid (i, j).
pub fn nsew_solve(table: &DetTable, ctx: FieldCtx, i: usize, j: usize) -> Option<u64> {
    debug_assert!(j >= 2);
    let center = table.value(i, j - 2);
    if center == 0 {
        return None;
    }
    let north = table.value(i, j - 1);
    let east = table.value(i + 1, j - 1);
    let west = table.value(i - 1, j - 1);
    let num = ctx.sub(ctx.mul(north, north), ctx.mul(east, west));
    Some(ctx.mul(num, ctx.inv(center).expect("center nonzero")))
}

/// Cross identity along a column run of zeros: with `d(i, k) = 0` for
/// `j0 <= k < j` and `d(i, j0-1) != 0`, the cell is the determinant of the
/// `(m+1) x (m+1)` window matrix on row `j0` times `d(i, j0-1)^(j0-j)`,
/// where `m = j - j0` is the depth of singularity. Returns the value and m.
pub fn cross_solve(table: &DetTable, ctx: FieldCtx, i: usize, j: usize) -> Option<(u64, u32)> {
    debug_assert!(j >= 2);
    if table.value(i, j - 1) != 0 {
        return None;
    }
    let mut j0 = j - 1;
    while table.value(i, j0 - 1) == 0 {
        j0 -= 1; // row 0 is all ones, so this terminates with j0 >= 1
    }
    let m = j - j0;
    // The window [i-m, i+m] on row j0 is in range for every valid (i, j).
    debug_assert!(i - m + 1 >= j0 && i + m <= table.n() - j0);
    let dim = m + 1;
    let pivot = table.value(i, j0 - 1);
    let det = if ctx.is_binary() {
        let words = dim.div_ceil(64);
        let mut rows = vec![0u64; dim * words];
        for r in 0..dim {
            for c in 0..dim {
                rows[r * words + c / 64] |= table.value(i - r + c, j0) << (c % 64);
            }
        }
        gf2_det_packed(&mut rows, dim, words)
    } else {
        let mut work = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                work.push(table.value(i - r + c, j0));
            }
        }
        det_in_place(&mut work, dim, ctx)
    };
    let scale = ctx.pow(pivot, -(m as i64)).expect("pivot nonzero");
    Some((ctx.mul(scale, det), m as u32))
}

/// A diamond-shaped grid neighbourhood: the `(k+1) x (k+1)` matrix with
/// entry `(r, c) = d(i - r + c, j - 2k + r + c)`, whose bottom-right corner
/// is the cell `(i, j)` itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl GridSpec {
    /// Validates `j >= 2k` and that (i, j) is a table cell; every grid index
    /// is then automatically inside the table.
    pub fn new(i: usize, j: usize, k: usize, n: usize) -> Result<Self> {
        if j < 2 * k {
            return Err(Error::IndexOutOfRange { i, j });
        }
        let (lo, hi) = valid_cols(j, n)?;
        if i < lo || i > hi {
            return Err(Error::IndexOutOfRange { i, j });
        }
        Ok(GridSpec { i, j, k })
    }
}

/// Materializes the grid matrix. With `zero_unknown` set, the bottom-right
/// cell is written as zero instead of being read from the table.
pub fn grid_matrix(table: &DetTable, g: GridSpec, zero_unknown: bool) -> Result<DenseMatrix> {
    let dim = g.k + 1;
    let mut m = DenseMatrix::from_rows(dim, vec![0; dim * dim]);
    for r in 0..dim {
        for c in 0..dim {
            if zero_unknown && r == g.k && c == g.k {
                continue;
            }
            match table.get(g.i - r + c, g.j - 2 * g.k + r + c)? {
                crate::table::Cell::Known(v) => m.set_at(r, c, v),
                crate::table::Cell::Unset => {
                    return Err(Error::IndexOutOfRange { i: g.i - r + c, j: g.j - 2 * g.k + r + c })
                }
            }
        }
    }
    Ok(m)
}

const GRID_MAX: usize = 7;

/// Solves `det(grid) = 0` for the unknown cell, growing the radius k = 2..6.
/// The coefficient of the unknown is the (k, k) cofactor, i.e. the radius
/// k-1 grid two rows up, which is fully known; a nonzero cofactor makes the
/// solution unique. Radius 7 additionally requires `d(i, j-7) = 0`.
/// Returns the value and the radius used.
///
/// The vanishing of the grid determinant is an F_2 phenomenon: over F_3
/// already there are cells with a unique solution that differs from the true
/// determinant (and no entrywise sign normalization repairs it), so for
/// q != 2 this branch reports not-applicable and the sweep falls through to
/// the proven cross identity.
pub fn grid_solve(table: &DetTable, ctx: FieldCtx, i: usize, j: usize) -> Option<(u64, u8)> {
    if !ctx.is_binary() || j < 4 || table.value(i, j - 2) != 0 {
        // only defined over F_2, and only where the NSEW step is inapplicable
        return None;
    }
    let mut cof = [0u64; GRID_MAX * GRID_MAX];
    let mut full = [0u64; (GRID_MAX + 1) * (GRID_MAX + 1)];
    for k in 2..=GRID_MAX.min(j / 2) {
        if k == 7 && table.value(i, j - 7) != 0 {
            return None;
        }
        // cofactor of the unknown: grid of radius k-1 at (i, j-2)
        for r in 0..k {
            for c in 0..k {
                cof[r * k + c] = table.value(i - r + c, j - 2 * k + r + c);
            }
        }
        let a_k = det_small(ctx, &mut cof[..k * k], k);
        if a_k == 0 {
            continue;
        }
        let dim = k + 1;
        for r in 0..dim {
            for c in 0..dim {
                full[r * dim + c] = if r == k && c == k {
                    0
                } else {
                    table.value(i - r + c, j - 2 * k + r + c)
                };
            }
        }
        let b_k = det_small(ctx, &mut full[..dim * dim], dim);
        let value = ctx.mul(ctx.neg(b_k), ctx.inv(a_k).expect("a_k nonzero"));
        return Some((value, k as u8));
    }
    None
}

/// Determinant of a tiny matrix held in a scratch buffer (dim <= 8).
fn det_small(ctx: FieldCtx, buf: &mut [u64], dim: usize) -> u64 {
    if ctx.is_binary() {
        let mut rows = [0u64; GRID_MAX + 1];
        for r in 0..dim {
            let mut w = 0u64;
            for c in 0..dim {
                w |= buf[r * dim + c] << c;
            }
            rows[r] = w;
        }
        for col in 0..dim {
            let mask = 1u64 << col;
            let Some(p) = (col..dim).find(|&r| rows[r] & mask != 0) else {
                return 0;
            };
            rows.swap(p, col);
            let pivot = rows[col];
            for row in rows.iter_mut().take(dim).skip(col + 1) {
                if *row & mask != 0 {
                    *row ^= pivot;
                }
            }
        }
        1
    } else {
        det_in_place(buf, dim, ctx)
    }
}
