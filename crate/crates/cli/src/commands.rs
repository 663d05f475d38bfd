//! Command implementations and the hand-rolled argument parser.

use std::fs;
use std::io::IsTerminal;
use std::time::Instant;

use hankel_scan::field::FieldCtx;
use hankel_scan::lfsr::{
    self, default_tau, find_linear_window, gen_easy_instance, gen_hard_instance,
    gen_planted_instance, plant_explicit, recover_generator, Generator, LinearInstance, SplitMix64,
};
use hankel_scan::scan::{
    compare_tables, scan, scan_accelerated, scan_trivial, BranchOrder, ConjecturePolicy, Mode,
    ScanOptions, ScanReport,
};
use hankel_scan::table::Sequence;

use crate::render::render_with;
use crate::seqfile;
use crate::stats::{AnswerDocument, StatsDocument};

const USAGE: &str = "\
usage: hankel-scan <command> [options]

commands:
  gen <hard|easy|planted>   generate an instance sequence (+ answer sidecar)
      -n N  -q Q  --seed S  --out PATH
      planted: -d D --start S --end T
      planted (explicit): --coeffs c0,c1,.. --prefix 0101.. --fill-len L [--postfix 0101..]
  scan <file>               fill the determinant table
      --mode accelerated|trivial  --conjecture on|off|verify  --order paper|safe
      --workers N  --stats PATH  --render  --color  --no-tags
      --early-stop [LEN]  --tau T  -q Q
  verify <file>             run both modes and compare tables
  verify --corpus random|hard|easy --count C -n N [-q Q] [--seed S0] [--workers N]
  render <file>             print the table ( -q Q, --color, --mode m )
  detect <file>             find a linear window and recover its generator
      --tau T  --stats PATH  -q Q  [--no-early-stop]
  bench                     time accelerated vs trivial scans
      --kind hard|easy|random  -n N  --trials T  --workers W1,W2,..  --seed S

exit codes: 0 success, 1 mismatch/verification failure, 2 usage error";

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |p| p.get())
}

struct Args {
    positional: Vec<String>,
    flags: Vec<(String, Option<String>)>,
}

impl Args {
    fn parse(args: &[String]) -> Args {
        let mut positional = Vec::new();
        let mut flags = Vec::new();
        let mut it = args.iter().peekable();
        while let Some(arg) = it.next() {
            if let Some(name) = arg.strip_prefix("--") {
                let value = it
                    .peek()
                    .filter(|v| !v.starts_with("--") && !(v.starts_with('-') && v.len() == 2))
                    .map(|v| v.to_string());
                if value.is_some() {
                    it.next();
                }
                flags.push((name.to_string(), value));
            } else if let Some(name) = arg.strip_prefix('-') {
                let value = it.next().map(|v| v.to_string());
                flags.push((name.to_string(), value));
            } else {
                positional.push(arg.clone());
            }
        }
        Args { positional, flags }
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.flags
            .iter()
            .rev()
            .find(|(f, _)| f == name)
            .and_then(|(_, v)| v.as_deref())
    }

    fn has(&self, name: &str) -> bool {
        self.flags.iter().any(|(f, _)| f == name)
    }

    fn parsed<T: std::str::FromStr>(&self, name: &str) -> Result<Option<T>, String> {
        match self.get(name) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| format!("bad value for --{name}: {v}")),
        }
    }
}

pub fn run(args: &[String]) -> i32 {
    let Some(command) = args.first() else {
        eprintln!("{USAGE}");
        return 2;
    };
    let rest = Args::parse(&args[1..]);
    let result = match command.as_str() {
        "gen" => cmd_gen(&rest),
        "scan" => cmd_scan(&rest),
        "verify" => cmd_verify(&rest),
        "render" => cmd_render(&rest),
        "detect" => cmd_detect(&rest),
        "bench" => cmd_bench(&rest),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(0)
        }
        other => Err(format!("unknown command: {other}\n{USAGE}")),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn field_from(args: &Args) -> Result<FieldCtx, String> {
    let q: u64 = args.parsed("q")?.unwrap_or(2);
    FieldCtx::new(q).map_err(|e| e.to_string())
}

fn parse_symbol_string(s: &str) -> Result<Vec<u64>, String> {
    if s.contains(',') {
        s.split(',')
            .map(|tok| tok.trim().parse().map_err(|_| format!("bad symbol list: {s}")))
            .collect()
    } else {
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(u64::from)
                    .ok_or_else(|| format!("bad symbol string: {s}"))
            })
            .collect()
    }
}

fn cmd_gen(args: &Args) -> Result<i32, String> {
    let kind = args
        .positional
        .first()
        .ok_or_else(|| format!("gen needs a kind\n{USAGE}"))?
        .clone();
    let ctx = field_from(args)?;
    let seed: u64 = args.parsed("seed")?.unwrap_or(1);
    let inst: LinearInstance = match kind.as_str() {
        "hard" | "easy" => {
            let n: usize = args
                .parsed("n")?
                .ok_or_else(|| "gen hard/easy needs -n".to_string())?;
            if kind == "hard" {
                gen_hard_instance(n, ctx, seed).map_err(|e| e.to_string())?
            } else {
                gen_easy_instance(n, ctx, seed).map_err(|e| e.to_string())?
            }
        }
        "planted" => {
            if let Some(coeffs) = args.get("coeffs") {
                let coeffs = parse_symbol_string(coeffs)?;
                let gen = Generator::new(coeffs).map_err(|e| e.to_string())?;
                let prefix = parse_symbol_string(
                    args.get("prefix").ok_or("explicit planted needs --prefix")?,
                )?;
                let fill_len: usize = args
                    .parsed("fill-len")?
                    .ok_or_else(|| "explicit planted needs --fill-len".to_string())?;
                let postfix =
                    parse_symbol_string(args.get("postfix").unwrap_or(""))?;
                plant_explicit(ctx, &prefix, &gen, fill_len, &postfix)
                    .map_err(|e| e.to_string())?
            } else {
                let n: usize = args.parsed("n")?.ok_or("gen planted needs -n")?;
                let d: usize = args.parsed("d")?.ok_or("gen planted needs -d")?;
                let s: usize = args.parsed("start")?.ok_or("gen planted needs --start")?;
                let t: usize = args.parsed("end")?.ok_or("gen planted needs --end")?;
                gen_planted_instance(n, d, s, t, ctx, seed).map_err(|e| e.to_string())?
            }
        }
        other => return Err(format!("unknown instance kind: {other}")),
    };
    let text = seqfile::write(&inst.x);
    match args.get("out") {
        Some(path) => {
            fs::write(path, &text).map_err(|e| format!("writing {path}: {e}"))?;
            let answer = AnswerDocument::from_instance(&inst, &kind);
            let answer_path = format!("{path}.answer.json");
            let json = serde_json::to_string_pretty(&answer).expect("serializable");
            fs::write(&answer_path, json).map_err(|e| format!("writing {answer_path}: {e}"))?;
            eprintln!(
                "wrote {} symbols to {path} (answer: {answer_path})",
                inst.x.len()
            );
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn scan_options(args: &Args) -> Result<ScanOptions, String> {
    let mode = match args.get("mode").unwrap_or("accelerated") {
        "accelerated" => Mode::Accelerated,
        "trivial" => Mode::Trivial,
        other => return Err(format!("unknown mode: {other}")),
    };
    let conjecture = match args.get("conjecture").unwrap_or("on") {
        "on" => ConjecturePolicy::On,
        "off" => ConjecturePolicy::Off,
        "verify" => ConjecturePolicy::Verify,
        other => return Err(format!("unknown conjecture policy: {other}")),
    };
    let order = match args.get("order").unwrap_or("paper") {
        "paper" => BranchOrder::Paper,
        "safe" => BranchOrder::Safe,
        other => return Err(format!("unknown branch order: {other}")),
    };
    let workers = args.parsed("workers")?.unwrap_or_else(default_workers);
    if workers == 0 {
        return Err("--workers must be at least 1".into());
    }
    Ok(ScanOptions {
        mode,
        conjecture,
        workers,
        early_stop_run_length: None,
        collect_branch_tags: !args.has("no-tags"),
        order,
    })
}

fn load_sequence(args: &Args, pos: usize) -> Result<Sequence, String> {
    let path = args
        .positional
        .get(pos)
        .ok_or_else(|| format!("missing input file\n{USAGE}"))?;
    let text = fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
    let q: u64 = args.parsed("q")?.unwrap_or(2);
    seqfile::parse(&text, q).map_err(|e| format!("{path}: {e}"))
}

fn write_stats(args: &Args, report: &ScanReport, q: u64) -> Result<(), String> {
    if let Some(path) = args.get("stats") {
        let doc = StatsDocument::from_report(report, q);
        let json = serde_json::to_string_pretty(&doc).expect("serializable");
        fs::write(path, json).map_err(|e| format!("writing {path}: {e}"))?;
    }
    Ok(())
}

fn use_color(args: &Args) -> bool {
    args.has("color") && std::io::stdout().is_terminal()
}

fn cmd_scan(args: &Args) -> Result<i32, String> {
    let x = load_sequence(args, 0)?;
    let mut opts = scan_options(args)?;
    if args.has("early-stop") {
        let tau: usize = args
            .parsed("early-stop")?
            .or(args.parsed("tau")?)
            .unwrap_or_else(|| default_tau(x.len()));
        opts.early_stop_run_length = Some(tau);
    }
    let report = scan(&x, &opts);
    write_stats(args, &report, x.ctx().modulus())?;
    if args.has("render") {
        let text = render_with(&report.table, &report.squares, use_color(args))
            .map_err(|e| e.to_string())?;
        print!("{text}");
    }
    for m in &report.mismatches {
        eprintln!(
            "conjecture mismatch at ({}, {}) radius {}: solved {} oracle {}",
            m.i, m.j, m.k, m.solved, m.oracle
        );
    }
    eprintln!(
        "scanned n={} q={} mode={:?} workers={} in {:.3} ms ({} cells, {} squares{})",
        x.len(),
        x.ctx().modulus(),
        report.mode,
        report.options.workers,
        report.elapsed_ms,
        report.stats.total(),
        report.squares.len(),
        if report.early_stopped { ", early stop" } else { "" }
    );
    Ok(0)
}

fn cmd_render(args: &Args) -> Result<i32, String> {
    let x = load_sequence(args, 0)?;
    let mut opts = scan_options(args)?;
    opts.collect_branch_tags = false;
    let report = scan(&x, &opts);
    let text =
        render_with(&report.table, &report.squares, use_color(args)).map_err(|e| e.to_string())?;
    print!("{text}");
    Ok(0)
}

/// Runs both scan modes on one sequence and prints any disagreement.
fn verify_one(x: &Sequence, workers: usize, label: &str) -> Result<bool, String> {
    let acc_opts = ScanOptions {
        conjecture: ConjecturePolicy::Verify,
        workers,
        collect_branch_tags: false,
        ..ScanOptions::default()
    };
    let acc = scan_accelerated(x, &acc_opts);
    let tri = scan_trivial(x, &acc_opts);
    let diffs = compare_tables(&tri.table, &acc.table).map_err(|e| e.to_string())?;
    for &(i, j, tv, av) in diffs.iter().take(20) {
        println!("{label}: cell ({i}, {j}) trivial={tv} accelerated={av}");
    }
    for m in &acc.mismatches {
        println!(
            "{label}: conjecture mismatch at ({}, {}) radius {}: solved {} oracle {}",
            m.i, m.j, m.k, m.solved, m.oracle
        );
    }
    if !acc.stats.total() == 0 {
        debug_assert_eq!(acc.stats.total() as usize, hankel_scan::table::entry_count(x.len()));
    }
    Ok(diffs.is_empty() && acc.mismatches.is_empty())
}

fn cmd_verify(args: &Args) -> Result<i32, String> {
    let workers = args.parsed("workers")?.unwrap_or_else(default_workers);
    let mut all_ok = true;
    if let Some(kind) = args.get("corpus") {
        let count: u64 = args.parsed("count")?.unwrap_or(10);
        let n: usize = args.parsed("n")?.unwrap_or(256);
        let ctx = field_from(args)?;
        let seed0: u64 = args.parsed("seed")?.unwrap_or(0);
        for seed in seed0..seed0 + count {
            let x = match kind {
                "random" => {
                    let mut rng = SplitMix64::new(seed);
                    let symbols: Vec<u64> =
                        (0..n).map(|_| rng.next_symbol(ctx.modulus())).collect();
                    Sequence::from_symbols(ctx, &symbols).map_err(|e| e.to_string())?
                }
                "hard" => gen_hard_instance(n, ctx, seed).map_err(|e| e.to_string())?.x,
                "easy" => gen_easy_instance(n, ctx, seed).map_err(|e| e.to_string())?.x,
                other => return Err(format!("unknown corpus kind: {other}")),
            };
            let ok = verify_one(&x, workers, &format!("{kind} n={n} seed={seed}"))?;
            all_ok &= ok;
        }
        println!(
            "verified {count} {kind} instances at n={n}: {}",
            if all_ok { "all tables coincide" } else { "MISMATCH" }
        );
    } else {
        let x = load_sequence(args, 0)?;
        all_ok = verify_one(&x, workers, "input")?;
        println!(
            "verify n={}: {}",
            x.len(),
            if all_ok { "tables coincide" } else { "MISMATCH" }
        );
    }
    Ok(if all_ok { 0 } else { 1 })
}

fn cmd_detect(args: &Args) -> Result<i32, String> {
    let x = load_sequence(args, 0)?;
    let tau: usize = args.parsed("tau")?.unwrap_or_else(|| default_tau(x.len()));
    let mut opts = scan_options(args)?;
    if !args.has("no-early-stop") {
        opts.early_stop_run_length = Some(tau);
    }
    let report = scan_accelerated(&x, &opts);
    write_stats(args, &report, x.ctx().modulus())?;
    let Some(square) = report.detect(tau) else {
        println!("no linear window found (tau = {tau})");
        return Ok(1);
    };
    let detection = recover_generator(&report.table, &x, &square).map_err(|e| e.to_string())?;
    let coeffs: Vec<String> = detection.gen.coeffs().iter().map(|c| c.to_string()).collect();
    println!(
        "square: columns {}..={} from row {} (run of {})",
        square.a,
        square.b,
        square.j0,
        square.run_len()
    );
    println!("generator (length {}): ({})", detection.gen.len(), coeffs.join(", "));
    println!(
        "window: ({}, {}] -> symbols x_{} .. x_{}",
        detection.window.0,
        detection.window.1,
        detection.window.0,
        detection.window.1 - 1
    );
    println!("window covers the detected square: {}", detection.success);
    Ok(if detection.success { 0 } else { 1 })
}

fn cmd_bench(args: &Args) -> Result<i32, String> {
    let kind = args.get("kind").unwrap_or("hard").to_string();
    let n: usize = args.parsed("n")?.unwrap_or(512);
    let trials: usize = args.parsed("trials")?.unwrap_or(3);
    let seed: u64 = args.parsed("seed")?.unwrap_or(1);
    let ctx = field_from(args)?;
    let workers_list: Vec<usize> = match args.get("workers") {
        None => vec![1, default_workers()],
        Some(list) => list
            .split(',')
            .map(|w| w.trim().parse().map_err(|_| format!("bad workers list: {list}")))
            .collect::<Result<_, _>>()?,
    };
    let x = match kind.as_str() {
        "hard" => gen_hard_instance(n, ctx, seed).map_err(|e| e.to_string())?.x,
        "easy" => gen_easy_instance(n, ctx, seed).map_err(|e| e.to_string())?.x,
        "random" => {
            let mut rng = SplitMix64::new(seed);
            let symbols: Vec<u64> = (0..n).map(|_| rng.next_symbol(ctx.modulus())).collect();
            Sequence::from_symbols(ctx, &symbols).map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown bench kind: {other}")),
    };
    println!("bench {kind} n={n}, {trials} trials");
    let mut lines = Vec::new();
    for &workers in &workers_list {
        let opts = ScanOptions { workers, collect_branch_tags: false, ..ScanOptions::default() };
        let mut acc_ms = 0.0;
        let mut tri_ms = 0.0;
        for _ in 0..trials {
            let t0 = Instant::now();
            let _ = scan_accelerated(&x, &opts);
            acc_ms += t0.elapsed().as_secs_f64() * 1e3;
            let t0 = Instant::now();
            let _ = scan_trivial(&x, &opts);
            tri_ms += t0.elapsed().as_secs_f64() * 1e3;
        }
        acc_ms /= trials as f64;
        tri_ms /= trials as f64;
        let line = format!(
            "workers={workers}: accelerated {acc_ms:.6} ms, trivial {tri_ms:.6} ms, ratio {:.6}",
            acc_ms / tri_ms
        );
        println!("{line}");
        lines.push(line);
    }
    if let Some(path) = args.get("out") {
        fs::write(path, lines.join("\n") + "\n").map_err(|e| format!("writing {path}: {e}"))?;
    }
    Ok(0)
}

/// Library hook used by the binary and the integration tests.
pub fn lfsr_roundtrip(x: &Sequence, tau: usize) -> Option<(Generator, (usize, usize))> {
    let opts = ScanOptions {
        early_stop_run_length: Some(tau),
        collect_branch_tags: false,
        ..ScanOptions::default()
    };
    let report = scan_accelerated(x, &opts);
    let square = lfsr::detect_linear_run(&report.squares, tau)?;
    let det = recover_generator(&report.table, x, &square).ok()?;
    det.success.then_some((det.gen, det.window))
}

/// Re-derives the maximal window for an externally supplied generator.
pub fn window_of(x: &Sequence, gen: &Generator) -> Option<(usize, usize)> {
    find_linear_window(x, gen)
}
