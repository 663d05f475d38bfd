//! Table-filling drivers: the trivial oracle scan and the accelerated
//! dynamic-programming scan of rows 2..=h.
//!
//! Each accelerated row is processed in two phases. A sequential phase finds
//! fresh zero squares on the row above (plus edge-anchored windows) and
//! writes their forced zeros ahead into later rows. The sweep phase then
//! computes every still-unset cell of the row from rows above it, trying
//! NSEW, then the grid equations, then the cross identity, and only then an
//! explicit elimination. Sweep cells are independent of one another, so the
//! phase is data-parallel; results are merged in column order, which makes
//! the output bit-identical for any worker count.

use std::time::Instant;

use crate::dense::det_direct;
use crate::field::FieldCtx;
use crate::identities::{
    cross_solve, fill_zero_square, find_edge_runs, find_zero_squares, grid_solve, nsew_solve,
    ZeroSquare,
};
use crate::lfsr::{self, default_tau};
use crate::table::{valid_cols, BranchStats, BranchTag, DetTable, Sequence};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Accelerated,
    Trivial,
}

/// How the conjectural grid branch participates in the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjecturePolicy {
    /// Trust grid solutions (the paper's default).
    On,
    /// Never take the grid branch.
    Off,
    /// Take it, but cross-check every solution against the oracle, log any
    /// disagreement and keep the oracle value.
    Verify,
}

/// Position of the conjectural grid branch relative to the proven cross
/// identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchOrder {
    /// Grid before cross, as the paper's algorithm lists them.
    Paper,
    /// Cross before grid, so the conjecture only fires where nothing proven
    /// applies.
    Safe,
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub mode: Mode,
    pub conjecture: ConjecturePolicy,
    pub workers: usize,
    /// Stop after the current row once a zero run at least this long is
    /// registered as a square.
    pub early_stop_run_length: Option<usize>,
    pub collect_branch_tags: bool,
    pub order: BranchOrder,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            mode: Mode::Accelerated,
            conjecture: ConjecturePolicy::On,
            workers: 1,
            early_stop_run_length: None,
            collect_branch_tags: true,
            order: BranchOrder::Paper,
        }
    }
}

/// A grid solution that disagreed with the oracle (never observed; kept as
/// the falsification record the conjecture calls for).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConjectureMismatch {
    pub i: usize,
    pub j: usize,
    pub k: u8,
    pub solved: u64,
    pub oracle: u64,
}

pub struct ScanReport {
    pub table: DetTable,
    pub stats: BranchStats,
    pub squares: Vec<ZeroSquare>,
    pub elapsed_ms: f64,
    pub mode: Mode,
    pub options: ScanOptions,
    pub mismatches: Vec<ConjectureMismatch>,
    pub early_stopped: bool,
}

impl ScanReport {
    /// First (topmost) registered square with a run of at least `tau` zeros.
    pub fn detect(&self, tau: usize) -> Option<ZeroSquare> {
        lfsr::detect_linear_run(&self.squares, tau)
    }
}

type CellResult = (u64, BranchTag, Option<ConjectureMismatch>);

/// Runs the per-cell closure over pending columns, in parallel when a pool
/// is provided; the collected order is the column order either way.
#[cfg(feature = "parallel")]
fn compute_cells<F>(pending: &[usize], pool: Option<&rayon::ThreadPool>, f: F) -> Vec<CellResult>
where
    F: Fn(usize) -> CellResult + Sync,
{
    use rayon::prelude::*;
    match pool {
        Some(pool) => pool.install(|| pending.par_iter().map(|&i| f(i)).collect()),
        None => pending.iter().map(|&i| f(i)).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn compute_cells<F>(pending: &[usize], _pool: Option<&()>, f: F) -> Vec<CellResult>
where
    F: Fn(usize) -> CellResult + Sync,
{
    pending.iter().map(|&i| f(i)).collect()
}

#[cfg(feature = "parallel")]
fn build_pool(workers: usize) -> Option<rayon::ThreadPool> {
    (workers > 1).then(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool")
    })
}

#[cfg(not(feature = "parallel"))]
fn build_pool(_workers: usize) -> Option<()> {
    None
}

fn solve_cell(
    table: &DetTable,
    x: &Sequence,
    ctx: FieldCtx,
    i: usize,
    j: usize,
    conjecture: ConjecturePolicy,
    order: BranchOrder,
) -> CellResult {
    if let Some(v) = nsew_solve(table, ctx, i, j) {
        return (v, BranchTag::Nsew, None);
    }
    let try_grid = |_: ()| -> Option<CellResult> {
        let (v, k) = grid_solve(table, ctx, i, j)?;
        if conjecture == ConjecturePolicy::Verify {
            let oracle = det_direct(x, i, j).expect("valid cell");
            if oracle != v {
                return Some((oracle, BranchTag::Grid(k), Some(ConjectureMismatch {
                    i,
                    j,
                    k,
                    solved: v,
                    oracle,
                })));
            }
        }
        Some((v, BranchTag::Grid(k), None))
    };
    let try_cross = |_: ()| -> Option<CellResult> {
        cross_solve(table, ctx, i, j).map(|(v, m)| (v, BranchTag::Cross(m), None))
    };
    let grid_enabled = conjecture != ConjecturePolicy::Off;
    let solved = match order {
        BranchOrder::Paper => grid_enabled
            .then(|| try_grid(()))
            .flatten()
            .or_else(|| try_cross(())),
        BranchOrder::Safe => try_cross(())
            .or_else(|| grid_enabled.then(|| try_grid(())).flatten()),
    };
    solved.unwrap_or_else(|| {
        let v = det_direct(x, i, j).expect("valid cell");
        (v, BranchTag::Direct, None)
    })
}

/// The dynamic-programming scan. The result table is bit-identical to the
/// trivial scan's for any worker count.
pub fn scan_accelerated(x: &Sequence, opts: &ScanOptions) -> ScanReport {
    let start = Instant::now();
    let ctx = x.ctx();
    let n = x.len();
    let h = n.div_ceil(2);
    let mut table = DetTable::init_with(x, opts.collect_branch_tags);
    let mut stats = BranchStats::default();
    let mut squares: Vec<ZeroSquare> = Vec::new();
    // squares whose row span can still cover upcoming runs; the full list
    // would make the per-row containment checks quadratic
    let mut active: Vec<ZeroSquare> = Vec::new();
    let mut mismatches: Vec<ConjectureMismatch> = Vec::new();
    let mut early_stopped = false;
    let edge_min = default_tau(n);
    let pool = build_pool(opts.workers);

    for j in 2..=h {
        // phase 1 (sequential): register fresh squares, write their zeros
        // ahead of the sweep
        active.retain(|sq| sq.j1 + 1 >= j);
        let fresh = find_zero_squares(&table, j, &active);
        for sq in fresh {
            let written = fill_zero_square(&mut table, &sq, j).expect("square fill is consistent");
            stats.square_fill += written;
            squares.push(sq);
            active.push(sq);
        }
        for run in find_edge_runs(&table, j, edge_min, &active) {
            for sq in lfsr::verify_edge_run(x, &run) {
                if sq.j1 >= j && !active.contains(&sq) {
                    let written =
                        fill_zero_square(&mut table, &sq, j).expect("edge fill is consistent");
                    stats.square_fill += written;
                    squares.push(sq);
                    active.push(sq);
                }
            }
        }
        if let Some(threshold) = opts.early_stop_run_length {
            if active.iter().any(|sq| sq.run_len() >= threshold) {
                early_stopped = true;
            }
        }

        // phase 2 (parallel): sweep the still-unset cells of row j
        let (lo, hi) = valid_cols(j, n).expect("row in range");
        let pending: Vec<usize> = (lo..=hi).filter(|&i| !table.is_known(i, j)).collect();
        let results = compute_cells(&pending, pool.as_ref(), |i| {
            solve_cell(&table, x, ctx, i, j, opts.conjecture, opts.order)
        });
        for (&i, (v, tag, mismatch)) in pending.iter().zip(results) {
            table.set(i, j, v, tag).expect("sweep writes fresh cells");
            stats.record(tag);
            if let Some(m) = mismatch {
                mismatches.push(m);
            }
        }

        if early_stopped {
            break;
        }
    }

    ScanReport {
        table,
        stats,
        squares,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        mode: Mode::Accelerated,
        options: opts.clone(),
        mismatches,
        early_stopped,
    }
}

/// The oracle scan: every cell by explicit elimination.
pub fn scan_trivial(x: &Sequence, opts: &ScanOptions) -> ScanReport {
    let start = Instant::now();
    let n = x.len();
    let h = n.div_ceil(2);
    let mut table = DetTable::init_with(x, opts.collect_branch_tags);
    let mut stats = BranchStats::default();
    let pool = build_pool(opts.workers);
    for j in 2..=h {
        let (lo, hi) = valid_cols(j, n).expect("row in range");
        let pending: Vec<usize> = (lo..=hi).collect();
        let results = compute_cells(&pending, pool.as_ref(), |i| {
            (det_direct(x, i, j).expect("valid cell"), BranchTag::Direct, None)
        });
        for (&i, (v, tag, _)) in pending.iter().zip(results) {
            table.set(i, j, v, tag).expect("fresh cell");
            stats.record(tag);
        }
    }
    ScanReport {
        table,
        stats,
        squares: Vec::new(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        mode: Mode::Trivial,
        options: opts.clone(),
        mismatches: Vec::new(),
        early_stopped: false,
    }
}

/// Dispatch on `opts.mode`.
pub fn scan(x: &Sequence, opts: &ScanOptions) -> ScanReport {
    match opts.mode {
        Mode::Accelerated => scan_accelerated(x, opts),
        Mode::Trivial => scan_trivial(x, opts),
    }
}

/// Cell-by-cell comparison of two complete tables over the same n and q.
/// Returns one record per disagreeing cell.
pub fn compare_tables(a: &DetTable, b: &DetTable) -> Result<Vec<(usize, usize, u64, u64)>> {
    if a.n() != b.n() || a.modulus() != b.modulus() {
        return Err(Error::ShapeMismatch);
    }
    let mut mismatches = Vec::new();
    for j in 0..=a.h() {
        let (lo, hi) = valid_cols(j, a.n())?;
        for i in lo..=hi {
            let va = a.value(i, j);
            let vb = b.value(i, j);
            if va != vb {
                mismatches.push((i, j, va, vb));
            }
        }
    }
    Ok(mismatches)
}
