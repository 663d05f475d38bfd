//! Direct determinant evaluation: the oracle every identity is checked
//! against. Over F_2 matrices are bit-packed and eliminated with word XORs;
//! over other prime fields plain residue elimination is used. Exact
//! arithmetic needs no pivot-magnitude strategy, so pivots are simply the
//! first nonzero entry in the column.

use crate::field::FieldCtx;
use crate::table::Sequence;
use crate::{Error, Result};

/// A square row-major matrix of field residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    dim: usize,
    entries: Vec<u64>,
}

impl DenseMatrix {
    pub fn from_rows(dim: usize, entries: Vec<u64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entries must be dim x dim");
        DenseMatrix { dim, entries }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        DenseMatrix { dim, entries }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.dim + c]
    }

    #[inline]
    pub fn set_at(&mut self, r: usize, c: usize, v: u64) {
        self.entries[r * self.dim + c] = v;
    }
}

/// Exact determinant of a square matrix over F_q.
pub fn det_generic(m: &DenseMatrix, ctx: FieldCtx) -> u64 {
    if ctx.is_binary() {
        let words = m.dim.div_ceil(64);
        let mut rows = vec![0u64; m.dim * words];
        for r in 0..m.dim {
            for c in 0..m.dim {
                rows[r * words + c / 64] |= (m.entries[r * m.dim + c] & 1) << (c % 64);
            }
        }
        gf2_det_packed(&mut rows, m.dim, words)
    } else {
        let mut work = m.entries.clone();
        det_in_place(&mut work, m.dim, ctx)
    }
}

/// Entry (r, c) of the j-by-j Hankel matrix anchored at column i: x[i - r + c].
/// The top row runs x_i .. x_{i+j-1}; each lower row shifts indices down by one.
pub fn hankel_entry(x: &Sequence, i: usize, j: usize, r: usize, c: usize) -> Result<u64> {
    check_anchor(x.len(), i, j)?;
    if j == 0 || r >= j || c >= j {
        return Err(Error::IndexOutOfRange { i, j });
    }
    Ok(x.get(i - r + c))
}

fn check_anchor(n: usize, i: usize, j: usize) -> Result<()> {
    let h = n.div_ceil(2);
    if j > h {
        return Err(Error::IndexOutOfRange { i, j });
    }
    let ok = if j == 0 {
        i < n
    } else {
        i + 1 >= j && i + j <= n
    };
    if ok {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { i, j })
    }
}

/// Determinant of the Hankel matrix at (i, j) straight from the sequence,
/// with the conventions d(i, 0) = 1 and d(i, 1) = x_i.
pub fn det_direct(x: &Sequence, i: usize, j: usize) -> Result<u64> {
    check_anchor(x.len(), i, j)?;
    match j {
        0 => Ok(1),
        1 => Ok(x.get(i)),
        _ => {
            if x.ctx().is_binary() {
                Ok(det_hankel_gf2(x, i, j))
            } else {
                let mut work = Vec::with_capacity(j * j);
                for r in 0..j {
                    for c in 0..j {
                        work.push(x.get(i - r + c));
                    }
                }
                Ok(det_in_place(&mut work, j, x.ctx()))
            }
        }
    }
}

fn det_hankel_gf2(x: &Sequence, i: usize, j: usize) -> u64 {
    let words = j.div_ceil(64);
    let bits = x.packed_bits();
    let mut rows = vec![0u64; j * words];
    for r in 0..j {
        extract_bits(bits, i - r, j, &mut rows[r * words..(r + 1) * words]);
    }
    gf2_det_packed(&mut rows, j, words)
}

/// Copies `len` bits starting at bit `start` of `bits` into `out`, LSB-first.
fn extract_bits(bits: &[u64], start: usize, len: usize, out: &mut [u64]) {
    let w = start / 64;
    let s = start % 64;
    let words = len.div_ceil(64);
    if s == 0 {
        out[..words].copy_from_slice(&bits[w..w + words]);
    } else {
        for t in 0..words {
            let lo = bits[w + t] >> s;
            let hi = bits.get(w + t + 1).copied().unwrap_or(0) << (64 - s);
            out[t] = lo | hi;
        }
    }
    let tail = len % 64;
    if tail != 0 {
        out[words - 1] &= (1u64 << tail) - 1;
    }
}

/// Determinant over F_2 of bit-packed rows (`dim` rows of `words` words each).
pub(crate) fn gf2_det_packed(rows: &mut [u64], dim: usize, words: usize) -> u64 {
    if dim >= 96 {
        gf2_det_m4r(rows, dim, words)
    } else {
        gf2_det_naive(rows, dim, words)
    }
}

fn gf2_det_naive(rows: &mut [u64], dim: usize, words: usize) -> u64 {
    for col in 0..dim {
        let w = col / 64;
        let mask = 1u64 << (col % 64);
        let mut pivot = None;
        for r in col..dim {
            if rows[r * words + w] & mask != 0 {
                pivot = Some(r);
                break;
            }
        }
        let Some(p) = pivot else { return 0 };
        if p != col {
            for t in w..words {
                rows.swap(p * words + t, col * words + t);
            }
        }
        let (head, tail) = rows.split_at_mut((col + 1) * words);
        let pivot_row = &head[col * words + w..(col + 1) * words];
        for r in 0..dim - col - 1 {
            let row = &mut tail[r * words + w..(r + 1) * words];
            if row[0] & mask != 0 {
                for (a, b) in row.iter_mut().zip(pivot_row) {
                    *a ^= b;
                }
            }
        }
    }
    1
}

const M4R_BLOCK: usize = 8;

/// Four-Russians elimination: pivots are located per 8-column block on a
/// one-word scratch image, the eight pivot rows are reduced among
/// themselves, and every remaining row then clears all eight columns with a
/// single table-lookup XOR. Any unpivotable column means a zero determinant.
fn gf2_det_m4r(rows: &mut [u64], dim: usize, words: usize) -> u64 {
    let mut table = vec![0u64; (1 << M4R_BLOCK) * words];
    let mut block_img = vec![0u64; dim];
    let mut piv_copy = vec![0u64; words];
    let mut c0 = 0usize;
    while c0 < dim {
        let width = M4R_BLOCK.min(dim - c0);
        let w0 = c0 / 64;
        let shift = c0 % 64; // block never straddles a word (8 | 64)
        let block_mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };

        // scratch image of the block word for the candidate rows, eliminated
        // incrementally so pivot search sees up-to-date bits
        for r in c0..dim {
            block_img[r] = rows[r * words + w0] >> shift & block_mask;
        }
        for (b, col) in (c0..c0 + width).enumerate() {
            let bit = 1u64 << b;
            let Some(p) = (col..dim).find(|&r| block_img[r] & bit != 0) else {
                return 0;
            };
            if p != col {
                block_img.swap(p, col);
                for t in w0..words {
                    rows.swap(p * words + t, col * words + t);
                }
            }
            let piv = block_img[col];
            for img in block_img.iter_mut().take(dim).skip(col + 1) {
                if *img & bit != 0 {
                    *img ^= piv;
                }
            }
        }

        // Gauss-Jordan among the pivot rows so each carries exactly one
        // block bit; the table lookup below relies on that
        for b in 0..width {
            let col = c0 + b;
            let mask = 1u64 << (b + shift);
            piv_copy[w0..words].copy_from_slice(&rows[col * words + w0..(col + 1) * words]);
            for r in c0..c0 + width {
                if r == col {
                    continue;
                }
                let row = &mut rows[r * words + w0..(r + 1) * words];
                if row[0] & mask != 0 {
                    for (a, v) in row.iter_mut().zip(&piv_copy[w0..words]) {
                        *a ^= v;
                    }
                }
            }
        }

        // Gray-code table of all pivot-row combinations over words w0..
        let twidth = words - w0;
        let entries = 1usize << width;
        table[..twidth].fill(0);
        let mut prev = 0usize;
        for g in 1..entries {
            let gray = g ^ (g >> 1);
            let flipped = (gray ^ prev).trailing_zeros() as usize;
            let src = (c0 + flipped) * words + w0;
            table.copy_within(prev * twidth..prev * twidth + twidth, gray * twidth);
            let dst = &mut table[gray * twidth..gray * twidth + twidth];
            for (a, b) in dst.iter_mut().zip(&rows[src..src + twidth]) {
                *a ^= b;
            }
            prev = gray;
        }

        // one lookup-XOR per remaining row clears the whole block
        for r in c0 + width..dim {
            let start = r * words + w0;
            let idx = (rows[start] >> shift & block_mask) as usize;
            if idx != 0 {
                let row = &mut rows[start..start + twidth];
                let tbl = &table[idx * twidth..idx * twidth + twidth];
                for (a, b) in row.iter_mut().zip(tbl) {
                    *a ^= b;
                }
            }
        }
        c0 += width;
    }
    1
}

/// Solves `A v = e_unit` for an invertible A; `None` when A is singular.
pub(crate) fn solve_unit(a: &DenseMatrix, unit: usize, ctx: FieldCtx) -> Option<Vec<u64>> {
    let dim = a.dim();
    if ctx.is_binary() {
        // rows carry the augmented column at bit position `dim`
        let words = (dim + 1).div_ceil(64);
        let mut rows = vec![0u64; dim * words];
        for r in 0..dim {
            for c in 0..dim {
                rows[r * words + c / 64] |= (a.at(r, c) & 1) << (c % 64);
            }
        }
        rows[unit * words + dim / 64] |= 1 << (dim % 64);
        for col in 0..dim {
            let w = col / 64;
            let mask = 1u64 << (col % 64);
            let p = (col..dim).find(|&r| rows[r * words + w] & mask != 0)?;
            if p != col {
                for t in 0..words {
                    rows.swap(p * words + t, col * words + t);
                }
            }
            let pivot_row: Vec<u64> = rows[col * words..(col + 1) * words].to_vec();
            for r in 0..dim {
                if r != col && rows[r * words + w] & mask != 0 {
                    for t in 0..words {
                        rows[r * words + t] ^= pivot_row[t];
                    }
                }
            }
        }
        Some((0..dim).map(|r| rows[r * words + dim / 64] >> (dim % 64) & 1).collect())
    } else {
        let mut work = vec![0u64; dim * (dim + 1)];
        for r in 0..dim {
            for c in 0..dim {
                work[r * (dim + 1) + c] = a.at(r, c);
            }
        }
        work[unit * (dim + 1) + dim] = 1;
        let cols = dim + 1;
        for col in 0..dim {
            let p = (col..dim).find(|&r| work[r * cols + col] != 0)?;
            if p != col {
                for t in 0..cols {
                    work.swap(p * cols + t, col * cols + t);
                }
            }
            let inv = ctx.inv(work[col * cols + col]).expect("pivot nonzero");
            for t in col..cols {
                work[col * cols + t] = ctx.mul(work[col * cols + t], inv);
            }
            for r in 0..dim {
                if r != col && work[r * cols + col] != 0 {
                    let factor = work[r * cols + col];
                    for t in col..cols {
                        let sub = ctx.mul(factor, work[col * cols + t]);
                        work[r * cols + t] = ctx.sub(work[r * cols + t], sub);
                    }
                }
            }
        }
        Some((0..dim).map(|r| work[r * cols + dim]).collect())
    }
}

/// Kernel vector of a matrix whose nullity is exactly one; `None` otherwise.
pub(crate) fn nullspace_unique(a: &DenseMatrix, ctx: FieldCtx) -> Option<Vec<u64>> {
    let dim = a.dim();
    if ctx.is_binary() {
        let words = dim.div_ceil(64);
        let mut rows = vec![0u64; dim * words];
        for r in 0..dim {
            for c in 0..dim {
                rows[r * words + c / 64] |= (a.at(r, c) & 1) << (c % 64);
            }
        }
        let mut pivot_cols = Vec::with_capacity(dim);
        let mut rank = 0usize;
        for col in 0..dim {
            let w = col / 64;
            let mask = 1u64 << (col % 64);
            let Some(p) = (rank..dim).find(|&r| rows[r * words + w] & mask != 0) else {
                continue;
            };
            if p != rank {
                for t in 0..words {
                    rows.swap(p * words + t, rank * words + t);
                }
            }
            let pivot_row: Vec<u64> = rows[rank * words..(rank + 1) * words].to_vec();
            for r in 0..dim {
                if r != rank && rows[r * words + w] & mask != 0 {
                    for t in 0..words {
                        rows[r * words + t] ^= pivot_row[t];
                    }
                }
            }
            pivot_cols.push(col);
            rank += 1;
        }
        if dim - rank != 1 {
            return None;
        }
        let free = (0..dim).find(|c| !pivot_cols.contains(c))?;
        let mut v = vec![0u64; dim];
        v[free] = 1;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = rows[r * words + free / 64] >> (free % 64) & 1;
        }
        Some(v)
    } else {
        let mut work = a.clone();
        let mut pivot_cols = Vec::with_capacity(dim);
        let mut rank = 0usize;
        for col in 0..dim {
            let Some(p) = (rank..dim).find(|&r| work.at(r, col) != 0) else {
                continue;
            };
            for t in 0..dim {
                let tmp = work.at(p, t);
                work.set_at(p, t, work.at(rank, t));
                work.set_at(rank, t, tmp);
            }
            let inv = ctx.inv(work.at(rank, col)).expect("pivot nonzero");
            for t in 0..dim {
                work.set_at(rank, t, ctx.mul(work.at(rank, t), inv));
            }
            for r in 0..dim {
                if r != rank && work.at(r, col) != 0 {
                    let factor = work.at(r, col);
                    for t in 0..dim {
                        let sub = ctx.mul(factor, work.at(rank, t));
                        work.set_at(r, t, ctx.sub(work.at(r, t), sub));
                    }
                }
            }
            pivot_cols.push(col);
            rank += 1;
        }
        if dim - rank != 1 {
            return None;
        }
        let free = (0..dim).find(|c| !pivot_cols.contains(c))?;
        let mut v = vec![0u64; dim];
        v[free] = 1;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = ctx.neg(work.at(r, free));
        }
        Some(v)
    }
}

/// In-place elimination determinant over F_q on row-major residues.
pub fn det_in_place(a: &mut [u64], dim: usize, ctx: FieldCtx) -> u64 {
    let mut det = 1u64;
    for col in 0..dim {
        let mut pivot = None;
        for r in col..dim {
            if a[r * dim + col] != 0 {
                pivot = Some(r);
                break;
            }
        }
        let Some(p) = pivot else { return 0 };
        if p != col {
            for t in col..dim {
                a.swap(p * dim + t, col * dim + t);
            }
            det = ctx.neg(det);
        }
        let pv = a[col * dim + col];
        det = ctx.mul(det, pv);
        let inv = ctx.inv(pv).expect("pivot is nonzero");
        for r in col + 1..dim {
            let factor = ctx.mul(a[r * dim + col], inv);
            if factor == 0 {
                continue;
            }
            for t in col..dim {
                let sub = ctx.mul(factor, a[col * dim + t]);
                a[r * dim + t] = ctx.sub(a[r * dim + t], sub);
            }
        }
    }
    det
}
