//! Linear-subsequence semantics: planted-instance generation, detection of
//! long zero runs in the determinant table, and recovery of the generating
//! vector by inverting a flank Hankel system.
//!
//! A generating vector `c = (c_0 .. c_{d-1})` with `c_{d-1} = 1` holds on a
//! window `(s, t]` when `sum_i c_i x_{l-d+i} = 0` for every `l` in `(s, t]`.
//! Equivalently the symbols `x_s .. x_{t-1}` are each determined by their
//! `d - 1` predecessors, so `s` is the first generated position and `t` is
//! one past the last. A window of generator length `d` forces the zero block
//! `rows d ..= t-s`, `columns s ..= t-d` in the table, which is how windows
//! are found and why recovery reads row `d` of the table.

use crate::dense::{det_direct, nullspace_unique, solve_unit, DenseMatrix};
use crate::field::FieldCtx;
use crate::identities::{EdgeRun, ZeroSquare};
use crate::table::{Cell, DetTable, Sequence};
use crate::{Error, Result};

/// SplitMix64: 64-bit state advanced by the golden-ratio constant. Fixed
/// here (rather than a library RNG) so instance corpora are reproducible
/// from a seed across implementations.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// A symbol below `q`.
    pub fn next_symbol(&mut self, q: u64) -> u64 {
        self.next_u64() % q
    }
}

/// Coefficients of a linear recurrence, highest coordinate pinned to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    coeffs: Vec<u64>,
}

impl Generator {
    pub fn new(coeffs: Vec<u64>) -> Result<Self> {
        match coeffs.last() {
            Some(&1) => Ok(Generator { coeffs }),
            _ => Err(Error::BadLength("generator must end in 1".into())),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    #[inline]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Random generator of length d over F_q, `c_{d-1} = 1`. With
    /// `pin_head`, `c_0` is forced nonzero so the recurrence has full span.
    fn random(d: usize, ctx: FieldCtx, rng: &mut SplitMix64, pin_head: bool) -> Self {
        let q = ctx.modulus();
        let mut coeffs: Vec<u64> = (0..d - 1).map(|_| rng.next_symbol(q)).collect();
        if pin_head {
            if let Some(head) = coeffs.first_mut() {
                *head = 1 + rng.next_u64() % (q - 1);
            }
        }
        coeffs.push(1);
        Generator { coeffs }
    }
}

/// True when the window constraint holds at position `l` (needs d <= l <= n).
pub fn recurrence_holds(x: &Sequence, gen: &Generator, l: usize) -> bool {
    let ctx = x.ctx();
    let d = gen.len();
    debug_assert!(l >= d && l <= x.len());
    let mut acc = 0u64;
    for (i, &c) in gen.coeffs().iter().enumerate() {
        acc = ctx.add(acc, ctx.mul(c, x.get(l - d + i)));
    }
    acc == 0
}

/// Extends a length-d prefix by `count` symbols of the recurrence; each new
/// symbol is determined by its d-1 predecessors (the oldest prefix symbol is
/// the alignment slot of `c_{d-1}` and does not enter the sum).
pub fn extend_linear(ctx: FieldCtx, prefix: &[u64], gen: &Generator, count: usize) -> Result<Vec<u64>> {
    let d = gen.len();
    if prefix.len() != d {
        return Err(Error::LengthMismatch { expected: d, got: prefix.len() });
    }
    let mut window: Vec<u64> = prefix[1..].to_vec();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut acc = 0u64;
        for (i, &c) in gen.coeffs()[..d - 1].iter().enumerate() {
            acc = ctx.add(acc, ctx.mul(c, window[i]));
        }
        let next = ctx.neg(acc);
        out.push(next);
        if d > 1 {
            window.rotate_left(1);
            window[d - 2] = next;
        }
    }
    Ok(out)
}

/// The longest contiguous range of positions satisfying the recurrence,
/// reported as a window `(s, t]`; ties break toward the smallest `s`.
pub fn find_linear_window(x: &Sequence, gen: &Generator) -> Option<(usize, usize)> {
    let n = x.len();
    let d = gen.len();
    if d > n {
        return None;
    }
    let mut best: Option<(usize, usize)> = None;
    let mut run_start: Option<usize> = None;
    for l in d..=n + 1 {
        let holds = l <= n && recurrence_holds(x, gen, l);
        match (holds, run_start) {
            (true, None) => run_start = Some(l),
            (false, Some(start)) => {
                let cand = (start - 1, l - 1);
                if best.is_none_or(|b| cand.1 - cand.0 > b.1 - b.0) {
                    best = Some(cand);
                }
                run_start = None;
            }
            _ => {}
        }
    }
    best
}

/// A sequence with a planted linear window and its provenance.
#[derive(Debug, Clone)]
pub struct LinearInstance {
    pub x: Sequence,
    pub gen: Generator,
    /// Window per the module convention: symbols `x_s .. x_{t-1}` are
    /// recurrence-generated. The hard/easy recipes record the recipe's
    /// boundary labels here (7n/16 and 9n/16, or n/16 and n).
    pub s: usize,
    pub t: usize,
    pub seed: u64,
}

/// Worst-case recipe: random symbols up to 7n/16, a linear fill across the
/// middle eighth of the sequence with a generator of length n/16, then
/// random symbols to the end.
pub fn gen_hard_instance(n: usize, ctx: FieldCtx, seed: u64) -> Result<LinearInstance> {
    if n == 0 || !n.is_multiple_of(16) {
        return Err(Error::BadLength(format!("hard instance needs 16 | n, got {n}")));
    }
    let q = ctx.modulus();
    let d = n / 16;
    let s = 7 * n / 16;
    let t = 9 * n / 16;
    let mut rng = SplitMix64::new(seed);
    let gen = Generator::random(d, ctx, &mut rng, false);
    let mut symbols: Vec<u64> = (0..=s).map(|_| rng.next_symbol(q)).collect();
    let fill = extend_linear(ctx, &symbols[s + 1 - d..=s], &gen, t - s)?;
    symbols.extend(fill);
    symbols.extend((t + 1..n).map(|_| rng.next_symbol(q)));
    let x = Sequence::from_symbols(ctx, &symbols)?;
    Ok(LinearInstance { x, gen, s, t, seed })
}

/// Easy recipe: a random prefix as long as the generator, then a linear
/// fill all the way to the end (no random postfix).
pub fn gen_easy_instance(n: usize, ctx: FieldCtx, seed: u64) -> Result<LinearInstance> {
    if n == 0 || !n.is_multiple_of(16) {
        return Err(Error::BadLength(format!("easy instance needs 16 | n, got {n}")));
    }
    let q = ctx.modulus();
    let d = n / 16;
    let mut rng = SplitMix64::new(seed);
    let gen = Generator::random(d, ctx, &mut rng, false);
    let mut symbols: Vec<u64> = (0..d).map(|_| rng.next_symbol(q)).collect();
    let fill = extend_linear(ctx, &pad_register(&symbols, d), &gen, n - d)?;
    symbols.extend(fill);
    let x = Sequence::from_symbols(ctx, &symbols)?;
    Ok(LinearInstance { x, gen, s: d, t: n, seed })
}

/// The last d symbols before the fill point; a virtual zero fills the unused
/// alignment slot when fewer are available.
fn pad_register(symbols: &[u64], d: usize) -> Vec<u64> {
    if symbols.len() >= d {
        symbols[symbols.len() - d..].to_vec()
    } else {
        let mut reg = vec![0u64; d - symbols.len()];
        reg.extend_from_slice(symbols);
        reg
    }
}

/// Explicitly assembled instance: prefix, recurrence fill, postfix.
pub fn plant_explicit(
    ctx: FieldCtx,
    prefix: &[u64],
    gen: &Generator,
    fill_len: usize,
    postfix: &[u64],
) -> Result<LinearInstance> {
    let d = gen.len();
    if prefix.len() < d.saturating_sub(1) {
        return Err(Error::BadLength(format!(
            "prefix of {} symbols cannot seed a length-{d} generator",
            prefix.len()
        )));
    }
    let s = prefix.len();
    let mut symbols = prefix.to_vec();
    symbols.extend(extend_linear(ctx, &pad_register(prefix, d), gen, fill_len)?);
    symbols.extend_from_slice(postfix);
    let x = Sequence::from_symbols(ctx, &symbols)?;
    Ok(LinearInstance { x, gen: gen.clone(), s, t: s + fill_len, seed: 0 })
}

/// Plants a window at an arbitrary position: random prefix `x_0 .. x_{s-1}`,
/// recurrence fill `x_s .. x_{t-1}`, random postfix. Degenerate draws whose
/// window has linear complexity below d-1 (and so would surface a shorter
/// generator) are rejected and redrawn from the same stream.
pub fn gen_planted_instance(
    n: usize,
    d: usize,
    s: usize,
    t: usize,
    ctx: FieldCtx,
    seed: u64,
) -> Result<LinearInstance> {
    if d == 0 || d > s || s > t || t > n {
        return Err(Error::BadLength(format!(
            "planted window needs 1 <= d <= s <= t <= n, got d={d} s={s} t={t} n={n}"
        )));
    }
    let q = ctx.modulus();
    let mut rng = SplitMix64::new(seed);
    for _ in 0..1024 {
        let gen = Generator::random(d, ctx, &mut rng, true);
        let prefix: Vec<u64> = (0..s).map(|_| rng.next_symbol(q)).collect();
        let mut symbols = prefix.clone();
        symbols.extend(extend_linear(ctx, &pad_register(&prefix, d), &gen, t - s)?);
        symbols.extend((t..n).map(|_| rng.next_symbol(q)));
        let x = Sequence::from_symbols(ctx, &symbols)?;
        if d >= 2 && t - s >= 2 * d - 3 {
            // exact-complexity check: one (d-1)-sized determinant strictly
            // inside the window is nonzero iff the window's complexity is
            // exactly d-1
            let mid = (s + d - 2 + t - d).div_ceil(2);
            if det_direct(&x, mid, d - 1)? == 0 {
                continue;
            }
        }
        return Ok(LinearInstance { x, gen, s, t, seed });
    }
    Err(Error::BadLength("planted instance rejection did not converge".into()))
}

/// Default detection threshold: long enough that a pure-random table is
/// unlikely to contain a qualifying run anywhere. Fresh zero runs of width w
/// appear with probability about q^-w per table slot and a table has about
/// n^2/2 of them, so the threshold must grow like 2 log2 n, not log2 n
/// (measured: tau = 23 at n = 256 leaves 0 of 1000 random tables with a
/// qualifying run, while log2-sized thresholds fire on almost half of them).
pub fn default_tau(n: usize) -> usize {
    let ceil_log2 = (n.max(2) - 1).ilog2() as usize + 1;
    2 * ceil_log2 + 7
}

/// First (topmost, then leftmost) square whose run is at least `tau` long.
pub fn detect_linear_run(squares: &[ZeroSquare], tau: usize) -> Option<ZeroSquare> {
    squares
        .iter()
        .filter(|sq| sq.run_len() >= tau)
        .min_by_key(|sq| (sq.j0, sq.a))
        .copied()
}

/// Outcome of generator recovery from a detected square.
#[derive(Debug, Clone)]
pub struct DetectionResult {
    pub square: ZeroSquare,
    pub gen: Generator,
    /// Maximal verified window `(s, t]`.
    pub window: (usize, usize),
    /// True when the window explains the detected run.
    pub success: bool,
}

/// Recovers the generating vector behind a detected square. The generator
/// length is the square's top row `d = j0`; the d-by-d Hankel system at the
/// nonzero left flank (right flank as fallback, kernel of an in-run system
/// as a last resort) pins the coefficients, and a rescan of the sequence
/// yields the maximal window.
pub fn recover_generator(table: &DetTable, x: &Sequence, sq: &ZeroSquare) -> Result<DetectionResult> {
    let ctx = x.ctx();
    let n = x.len();
    let d = sq.j0;
    if d == 0 {
        return Err(Error::NoSquare);
    }
    let anchor_matrix = |anchor: usize| DenseMatrix::from_fn(d, |r, c| x.get(anchor - r + c));
    let flank_known_nonzero = |i: usize| {
        i + 1 >= d && i + d <= n && matches!(table.get(i, d), Ok(Cell::Known(v)) if v != 0)
    };

    // Left flank: rows of the system are the recurrence at l = a .. a+d-1,
    // of which only l = a (the row carrying the unit) fails inside x, so the
    // solution of X u = e_{d-1} is the generator up to scale.
    let mut coeffs = None;
    if sq.a >= 1 && flank_known_nonzero(sq.a - 1) {
        coeffs = solve_unit(&anchor_matrix(sq.a - 1), d - 1, ctx);
    }
    if coeffs.is_none() && flank_known_nonzero(sq.b + 1) {
        // mirror system at the right flank; the failing row is l = b+d+1
        coeffs = solve_unit(&anchor_matrix(sq.b + 1), 0, ctx);
    }
    if coeffs.is_none() && sq.b + 1 >= d && sq.b + d <= n {
        // no usable flank (run touches both edges): any in-run anchor is
        // singular and its kernel carries the generator when unique
        coeffs = nullspace_unique(&anchor_matrix(sq.b), ctx);
    }
    let Some(raw) = coeffs else {
        return Err(Error::SingularSystem);
    };
    let top = raw[d - 1];
    if top == 0 {
        return Err(Error::SingularSystem);
    }
    let inv = ctx.inv(top)?;
    let gen = Generator::new(raw.iter().map(|&v| ctx.mul(v, inv)).collect())?;
    let window = find_linear_window(x, &gen).ok_or(Error::SingularSystem)?;
    let success = window.0 <= sq.a && sq.b <= window.1;
    Ok(DetectionResult { square: *sq, gen, window, success })
}

/// Tries to explain an edge-touching zero run by a window anchored at the
/// matching end of the sequence, returning the forced zero block on success.
/// Verification is a rescan of the sequence itself, so a returned square is
/// sound no matter how the run arose.
pub fn verify_edge_run(x: &Sequence, run: &EdgeRun) -> Vec<ZeroSquare> {
    let mut squares = Vec::new();
    let d = run.j0;
    if d == 0 {
        return squares;
    }
    if run.touches_right {
        if let Some(sq) = tail_window_square(x, d) {
            squares.push(sq);
        }
    }
    if run.touches_left {
        if let Some(sq) = head_window_square(x, d) {
            squares.push(sq);
        }
    }
    squares
}

/// Window hypothesis reaching the end of the sequence: the kernel of the
/// rightmost row-d Hankel matrix proposes a generator; scanning backwards
/// from l = n yields the verified window (s, n] and its forced block.
fn tail_window_square(x: &Sequence, d: usize) -> Option<ZeroSquare> {
    let ctx = x.ctx();
    let n = x.len();
    let anchor = n - d;
    if anchor + 1 < d {
        return None;
    }
    let a = DenseMatrix::from_fn(d, |r, c| x.get(anchor - r + c));
    let gen = normalize(nullspace_unique(&a, ctx)?, ctx)?;
    if !recurrence_holds(x, &gen, n) {
        return None;
    }
    let mut s = n - 1;
    while s >= d && recurrence_holds(x, &gen, s) {
        s -= 1;
    }
    (s <= n - d).then(|| ZeroSquare::new(s, n - d, d))
}

/// Mirror hypothesis: the window starts at the very beginning of the
/// sequence; scanning forward from l = d yields (d-1, t] and its block.
fn head_window_square(x: &Sequence, d: usize) -> Option<ZeroSquare> {
    let ctx = x.ctx();
    let n = x.len();
    if n < 2 * d - 1 {
        return None;
    }
    let a = DenseMatrix::from_fn(d, |r, c| x.get(d - 1 - r + c));
    let gen = normalize(nullspace_unique(&a, ctx)?, ctx)?;
    if !recurrence_holds(x, &gen, d) {
        return None;
    }
    let mut t = d;
    while t < n && recurrence_holds(x, &gen, t + 1) {
        t += 1;
    }
    (t >= 2 * d - 1).then(|| ZeroSquare::new(d - 1, t - d, d))
}

fn normalize(raw: Vec<u64>, ctx: FieldCtx) -> Option<Generator> {
    let top = *raw.last()?;
    if top == 0 {
        return None;
    }
    let inv = ctx.inv(top).ok()?;
    Generator::new(raw.iter().map(|&v| ctx.mul(v, inv)).collect()).ok()
}
