//! JSON documents emitted by the tool: per-scan statistics and the answer
//! sidecar written next to generated instances. Both share the same overall
//! shape so downstream tooling needs a single parser.

use std::collections::BTreeMap;

use hankel_scan::lfsr::LinearInstance;
use hankel_scan::scan::{Mode, ScanReport};
use hankel_scan::table::entry_count;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SquareDoc {
    pub a: usize,
    pub b: usize,
    pub j0: usize,
    pub j1: usize,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct MismatchDoc {
    pub i: usize,
    pub j: usize,
    pub k: u8,
    pub solved: u64,
    pub oracle: u64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Counters {
    pub nsew: u64,
    pub square_fill: u64,
    pub direct: u64,
    pub grid: BTreeMap<u32, u64>,
    pub cross: BTreeMap<u32, u64>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct StatsDocument {
    pub n: usize,
    pub q: u64,
    pub mode: String,
    pub workers: usize,
    pub elapsed_ms: f64,
    pub counters: Counters,
    pub squares: Vec<SquareDoc>,
    pub conjecture_mismatches: Vec<MismatchDoc>,
}

impl StatsDocument {
    pub fn from_report(report: &ScanReport, q: u64) -> Self {
        let grid: BTreeMap<u32, u64> = (2..8)
            .filter(|&k| report.stats.grid[k as usize] != 0)
            .map(|k| (k as u32, report.stats.grid[k as usize]))
            .collect();
        StatsDocument {
            n: report.table.n(),
            q,
            mode: match report.mode {
                Mode::Accelerated => "accelerated".into(),
                Mode::Trivial => "trivial".into(),
            },
            workers: report.options.workers,
            elapsed_ms: report.elapsed_ms,
            counters: Counters {
                nsew: report.stats.nsew,
                square_fill: report.stats.square_fill,
                direct: report.stats.direct,
                grid,
                cross: report.stats.cross.clone(),
            },
            squares: report
                .squares
                .iter()
                .map(|sq| SquareDoc { a: sq.a, b: sq.b, j0: sq.j0, j1: sq.j1 })
                .collect(),
            conjecture_mismatches: report
                .mismatches
                .iter()
                .map(|m| MismatchDoc { i: m.i, j: m.j, k: m.k, solved: m.solved, oracle: m.oracle })
                .collect(),
        }
    }

    /// Counter total; equals `entry_count(n)` for full scans.
    pub fn counter_sum(&self) -> u64 {
        self.counters.nsew
            + self.counters.square_fill
            + self.counters.direct
            + self.counters.grid.values().sum::<u64>()
            + self.counters.cross.values().sum::<u64>()
    }

    pub fn counters_complete(&self) -> bool {
        self.counter_sum() == entry_count(self.n) as u64
    }
}

/// Sidecar describing a generated instance: what was planted and where.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct AnswerDocument {
    pub n: usize,
    pub q: u64,
    pub kind: String,
    pub seed: u64,
    pub d: usize,
    pub coeffs: Vec<u64>,
    pub window: SquareWindow,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SquareWindow {
    pub s: usize,
    pub t: usize,
}

impl AnswerDocument {
    pub fn from_instance(inst: &LinearInstance, kind: &str) -> Self {
        AnswerDocument {
            n: inst.x.len(),
            q: inst.x.ctx().modulus(),
            kind: kind.to_string(),
            seed: inst.seed,
            d: inst.gen.len(),
            coeffs: inst.gen.coeffs().to_vec(),
            window: SquareWindow { s: inst.s, t: inst.t },
        }
    }
}
