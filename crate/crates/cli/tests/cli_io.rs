//! End-to-end checks of the binary: file formats, pipelines, exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hankel-scan"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("hankel-scan-test-{}-{name}", std::process::id()));
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn usage_error_is_exit_2() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["scan", "/nonexistent/path.seq"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_scan_verify_pipeline() {
    let seq = tmp("pipeline.seq");
    let stats = tmp("pipeline.stats.json");
    let out = run(&["gen", "hard", "-n", "256", "--seed", "7", "--out", seq.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let answer: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(format!("{}.answer.json", seq.display())).unwrap())
            .unwrap();
    assert_eq!(answer["n"], 256);
    assert_eq!(answer["d"], 16);
    assert_eq!(answer["window"]["s"], 112);
    assert_eq!(answer["window"]["t"], 144);

    let out = run(&["scan", seq.to_str().unwrap(), "--stats", stats.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(doc["n"], 256);
    assert_eq!(doc["q"], 2);
    let c = &doc["counters"];
    let grid_sum: u64 = c["grid"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    let cross_sum: u64 =
        c["cross"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    let total = c["nsew"].as_u64().unwrap()
        + c["square_fill"].as_u64().unwrap()
        + c["direct"].as_u64().unwrap()
        + grid_sum
        + cross_sum;
    assert_eq!(total, hankel_scan::table::entry_count(256) as u64);

    let out = run(&["verify", seq.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let _ = fs::remove_file(&seq);
    let _ = fs::remove_file(format!("{}.answer.json", seq.display()));
    let _ = fs::remove_file(&stats);
}

#[test]
fn same_seed_same_bytes() {
    let a = tmp("det-a.seq");
    let b = tmp("det-b.seq");
    for path in [&a, &b] {
        let out = run(&["gen", "easy", "-n", "128", "--seed", "42", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let _ = fs::remove_file(&a);
    let _ = fs::remove_file(&b);
    let _ = fs::remove_file(format!("{}.answer.json", a.display()));
    let _ = fs::remove_file(format!("{}.answer.json", b.display()));
}

#[test]
fn scan_modes_render_identically() {
    let seq = tmp("modes.seq");
    let out = run(&["gen", "hard", "-n", "64", "--seed", "3", "--out", seq.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let acc = run(&["render", seq.to_str().unwrap(), "--mode", "accelerated"]);
    let tri = run(&["render", seq.to_str().unwrap(), "--mode", "trivial"]);
    assert_eq!(acc.status.code(), Some(0));
    assert_eq!(acc.stdout, tri.stdout);
    assert!(!acc.stdout.is_empty());
    let _ = fs::remove_file(&seq);
    let _ = fs::remove_file(format!("{}.answer.json", seq.display()));
}

#[test]
fn worker_counts_match_in_stats() {
    let seq = tmp("workers.seq");
    let out = run(&["gen", "hard", "-n", "128", "--seed", "5", "--out", seq.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut docs = Vec::new();
    for workers in ["1", "8"] {
        let stats = tmp(&format!("workers-{workers}.stats.json"));
        let out = run(&[
            "scan",
            seq.to_str().unwrap(),
            "--workers",
            workers,
            "--stats",
            stats.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let mut doc: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
        // timings and the worker echo legitimately differ
        doc["elapsed_ms"] = 0.into();
        doc["workers"] = 0.into();
        docs.push(doc);
        let _ = fs::remove_file(&stats);
    }
    assert_eq!(docs[0], docs[1]);
    let _ = fs::remove_file(&seq);
    let _ = fs::remove_file(format!("{}.answer.json", seq.display()));
}

#[test]
fn detect_finds_planted_and_rejects_random() {
    let seq = tmp("detect.seq");
    let out = run(&[
        "gen", "planted", "-n", "512", "-d", "8", "--start", "100", "--end", "300", "--seed", "2",
        "--out", seq.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["detect", seq.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("generator (length 8)"), "{text}");

    // pure random input: no window at the default threshold
    let mut body = String::from("#q=2 n=256\n");
    let mut state = 0x5EEDu64;
    for _ in 0..256 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        body.push(if state >> 40 & 1 == 1 { '1' } else { '0' });
    }
    body.push('\n');
    let rnd = tmp("detect-random.seq");
    fs::write(&rnd, body).unwrap();
    let out = run(&["detect", rnd.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let _ = fs::remove_file(&seq);
    let _ = fs::remove_file(format!("{}.answer.json", seq.display()));
    let _ = fs::remove_file(&rnd);
}

#[test]
fn verify_corpus_smoke() {
    let out = run(&["verify", "--corpus", "random", "--count", "3", "-n", "96"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = run(&["verify", "--corpus", "easy", "--count", "2", "-n", "128"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bench_smoke() {
    let out = run(&["bench", "--kind", "random", "-n", "64", "--trials", "1", "--workers", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("ratio"), "{text}");
}

#[test]
fn paper_sequence_renders_exactly() {
    let seq = tmp("golden32.seq");
    fs::write(&seq, "#q=2 n=32\n01010110100111010011101011101110\n").unwrap();
    let out = run(&["render", seq.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        include_str!("golden/table_n32.txt")
    );
    let _ = fs::remove_file(&seq);
}
