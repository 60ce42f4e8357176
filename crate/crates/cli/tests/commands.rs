use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use trajloop::trace::jsonl::StreamFrame;
use trajloop::trace::{generate, read_trace_auto, write_trace, SynthSpec, Trace, TraceFormat};
use trajloop_cli::stream::EventLine;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trajloop"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // The child may exit before consuming everything; a broken pipe is fine.
    let _ = child.stdin.take().unwrap().write_all(input);
    child.wait_with_output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn stream_input(trace: &Trace) -> Vec<u8> {
    let mut s = format!("{{\"dim\":{}}}\n", trace.dim().unwrap());
    for r in &trace.records {
        s.push_str(&serde_json::to_string(&StreamFrame { step: r.step, embedding: r.embedding.clone() }).unwrap());
        s.push('\n');
    }
    s.into_bytes()
}

fn events(stdout: &[u8]) -> Vec<EventLine> {
    text(stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn write_jsonl(dir: &Path, name: &str, trace: &Trace) -> String {
    let path = dir.join(name);
    write_trace(&path, trace, TraceFormat::Jsonl).unwrap();
    path.display().to_string()
}

#[test]
fn one_step_trace_is_all_warmup() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_jsonl(dir.path(), "one.jsonl", &Trace::from_embeddings(vec![vec![1.0, 2.0, 3.0]]));
    let out = run(&["analyze", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let report = text(&out.stdout);
    assert!(report.contains("steps: 1\n"), "{report}");
    assert!(report.contains("warmup: 1\n"));
    assert!(report.contains("cycle_enter: 0\n"));
    assert!(report.contains("first_early_exit: none\n"));
}

#[test]
fn dimension_mismatch_names_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    let mut body = String::new();
    for i in 0..12 {
        let dim = if i == 10 { 3 } else { 4 };
        let emb: Vec<f64> = (0..dim).map(|k| (i * 4 + k) as f64 + 1.0).collect();
        body.push_str(&serde_json::json!({"step": i, "embedding": emb}).to_string());
        body.push('\n');
    }
    std::fs::write(&path, body).unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("record 10"), "{}", text(&out.stderr));
}

#[test]
fn analyze_config_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_jsonl(dir.path(), "t.jsonl", &Trace::from_embeddings(vec![vec![1.0]; 4]));
    assert_eq!(run(&["analyze", &path, "--rho-star", "1.5"]).status.code(), Some(3));
    assert_eq!(run(&["analyze", &path, "--window", "4"]).status.code(), Some(3));
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "stability = 0\n").unwrap();
    assert_eq!(run(&["analyze", &path, "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn analyze_periodic_trace_writes_full_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_jsonl(dir.path(), "p.jsonl", &generate(&SynthSpec::periodic(8, 64, 4, 0.0, 7)).unwrap());
    let csv = dir.path().join("out.csv");
    let out = run(&["analyze", &path, "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = text(&out.stdout);
    assert!(report.contains("cycle_enter: 1\n"), "{report}");
    assert!(report.contains("first_cycle_enter: 39\n"), "{report}");

    let table = std::fs::read_to_string(csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("step,delta_mag,cos_ang,z,best_lag,rho,state,event"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 64);
    assert_eq!(rows[0][1..6], ["", "", "", "", ""]);
    assert_eq!(rows[0][6], "warmup");
    let max_rho = rows[32..].iter().map(|r| r[5].parse::<f64>().unwrap()).fold(f64::MIN, f64::max);
    assert!((max_rho - 1.0).abs() < 1e-9);
    for r in &rows[32..] {
        let lag: usize = r[4].parse().unwrap();
        assert!((1..=8).contains(&lag));
    }
    assert_eq!(rows[39][7], "cycle_enter");
}

#[test]
fn synth_is_deterministic_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        let out = run(&[
            "synth", "--kind", "periodic", "--dim", "8", "--length", "64", "--period", "4", "--seed", "7", "-o",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stderr.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let bad = run(&[
        "synth", "--kind", "periodic", "--dim", "8", "--length", "64", "--period", "0", "--seed", "7", "-o",
        dir.path().join("c.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(3));

    let comp = dir.path().join("comp.bin");
    let out = run(&[
        "synth", "--kind", "composite", "--dim", "8", "--segments", "walk:40,periodic:24", "--period", "4", "--seed",
        "1", "-o", comp.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(&std::fs::read(&comp).unwrap()[..4], b"CORE");
    assert_eq!(read_trace_auto(&comp).unwrap().len(), 64);
}

#[test]
fn synth_requires_a_seed() {
    let out = run(&["synth", "--kind", "random_walk", "--dim", "2", "--length", "5", "-o", "x.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stream_period_two_warms_up_then_reports() {
    let a = vec![1.0, 0.5, -0.25, 2.0];
    let b = vec![-0.5, 1.0, 0.75, 0.5];
    let trace = Trace::from_embeddings((0..33).map(|i| if i % 2 == 0 { a.clone() } else { b.clone() }).collect());
    let out = run_stdin(&["stream"], &stream_input(&trace));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let lines = events(&out.stdout);
    assert_eq!(lines.len(), 33);
    assert!(lines[..32].iter().all(|l| l.event == "warmup" && l.rho.is_none()));
    // Alternating embeddings give a constant z signal, which carries no
    // periodic evidence at any lag.
    assert_eq!(lines[32].event, "normal");
    assert_eq!(lines[32].rho, Some(0.0));
    assert_eq!(lines[32].ell, Some(1));
}

#[test]
fn stream_wrong_dim_exits_2() {
    let out = run_stdin(&["stream"], b"{\"dim\":4}\n{\"step\":0,\"embedding\":[1,2,3]}\n");
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains("expected dim 4, got 3"), "{err}");
}

#[test]
fn stream_one_shot_exits_10_after_early_exit() {
    let trace = generate(&SynthSpec::periodic(8, 100, 4, 0.0, 7)).unwrap();
    let out = run_stdin(&["stream", "--mode", "one_shot"], &stream_input(&trace));
    assert_eq!(out.status.code(), Some(10));
    let lines = events(&out.stdout);
    assert_eq!(lines.last().unwrap().event, "early_exit");
    assert_eq!(lines.len(), 40);
}

#[test]
fn analyze_equals_stream() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = SynthSpec::composite(
        8,
        trajloop::trace::synth::parse_segments("walk:50,periodic:50,walk:40").unwrap(),
        Some(3),
        11,
    );
    spec.noise_sigma = 0.02;
    let trace = generate(&spec).unwrap();
    let path = write_jsonl(dir.path(), "c.jsonl", &trace);
    let csv = dir.path().join("c.csv");
    let analyzed = run(&["analyze", &path, "--csv", csv.to_str().unwrap()]);
    assert_eq!(analyzed.status.code(), Some(0));
    let reread = read_trace_auto(&path).unwrap();
    let streamed = run_stdin(&["stream", "--mode", "monitor"], &stream_input(&reread));
    assert_eq!(streamed.status.code(), Some(0));
    let lines = events(&streamed.stdout);
    let table = std::fs::read_to_string(csv).unwrap();
    let rows: Vec<Vec<String>> = table.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), lines.len());
    for (row, line) in rows.iter().zip(&lines) {
        assert_eq!(row[0], line.step.to_string());
        assert_eq!(row[7], line.event);
        assert_eq!(row[4], line.ell.map_or(String::new(), |l| l.to_string()));
        assert_eq!(row[5], line.rho.map_or(String::new(), |r| r.to_string()));
    }
}

#[test]
fn sweep_reports_monotone_detection() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = SynthSpec::composite(
        8,
        trajloop::trace::synth::parse_segments("walk:40,periodic:80").unwrap(),
        Some(4),
        5,
    );
    spec.noise_sigma = 0.05;
    let path = write_jsonl(dir.path(), "n.jsonl", &generate(&spec).unwrap());
    let out = run(&["sweep", &path, "--rho-grid", "0.1,0.7", "--stability-grid", "1,8"]);
    assert_eq!(out.status.code(), Some(0));
    let table = text(&out.stdout);
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("trace,rho_star,stability,first_detection,steps,steps_saved"));
    let det: Vec<usize> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    // Row order: (0.1,1) (0.1,8) (0.7,1) (0.7,8).
    assert_eq!(det.len(), 4);
    assert!(det[0] <= det[2] && det[1] <= det[3], "{table}");
    assert!(det[0] <= det[1] && det[2] <= det[3], "{table}");

    assert_eq!(run(&["sweep", &path, "--rho-grid", ","]).status.code(), Some(3));
}

#[test]
fn sweep_on_random_walk_is_all_none() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_jsonl(dir.path(), "w.jsonl", &generate(&SynthSpec::random_walk(8, 300, 3)).unwrap());
    let out = run(&["sweep", &path, "--rho-grid", "0.7,0.9", "--stability-grid", "8,16"]);
    assert_eq!(out.status.code(), Some(0));
    let table = text(&out.stdout);
    for line in table.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[3], "none", "{table}");
        assert_eq!(cells[5], "0");
    }
}

#[test]
fn missing_input_is_an_io_failure() {
    let out = run(&["analyze", "/nonexistent/trace.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
}
