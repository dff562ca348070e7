//! End-to-end tests of the `qac` binary: exit codes, output formats,
//! seed plumbing, and every subcommand's happy path.

use std::io::Write as _;
use std::process::{Command, Output, Stdio};

fn qac() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qac"));
    cmd.env_remove("QAC_SEED");
    cmd
}

fn demo(name: &str) -> String {
    format!("{}/../../demos/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn counts_sum(line: &str) -> u64 {
    assert!(line.starts_with("counts "), "not a counts line: {line}");
    line.split_whitespace()
        .skip(2)
        .step_by(2)
        .map(|v| v.parse::<u64>().unwrap())
        .sum()
}

#[test]
fn run_session_script_prints_counts_and_qasm() {
    let out = qac()
        .args(["run", &demo("session.qac"), "--seed", "9"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let stdout = stdout_str(&out);
    let first = stdout.lines().next().unwrap();
    assert_eq!(counts_sum(first), 127);
    assert!(stdout.contains("OPENQASM 2.0;"));
    assert!(stdout.contains("measure q[0] -> c[0];"));
}

#[test]
fn same_seed_same_output() {
    let run = || {
        let out = qac()
            .args(["run", &demo("session.qac"), "--seed", "31"])
            .output()
            .unwrap();
        assert!(out.status.success());
        stdout_str(&out)
    };
    assert_eq!(run(), run());
}

#[test]
fn env_seed_matches_flag_and_flag_wins() {
    let flag = qac()
        .args(["run", &demo("session.qac"), "--seed", "5"])
        .output()
        .unwrap();
    let env = qac()
        .env("QAC_SEED", "5")
        .args(["run", &demo("session.qac")])
        .output()
        .unwrap();
    assert_eq!(stdout_str(&flag), stdout_str(&env));

    let overridden = qac()
        .env("QAC_SEED", "1234")
        .args(["run", &demo("session.qac"), "--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(stdout_str(&flag), stdout_str(&overridden));
}

#[test]
fn run_qasm_file_samples_counts() {
    let out = qac()
        .args(["run", &demo("bell.qasm"), "--shots", "100", "--seed", "1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let stdout = stdout_str(&out);
    let line = stdout.lines().next().unwrap();
    assert_eq!(counts_sum(line), 100);
    for key in line.split_whitespace().skip(1).step_by(2) {
        assert!(key == "00" || key == "11", "non-Bell key {key}");
    }
}

#[test]
fn run_minified_file_measures_every_qubit() {
    let out = qac()
        .args(["run", &demo("ghz.mqc"), "--shots", "64", "--seed", "2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let line = stdout_str(&out);
    let line = line.lines().next().unwrap();
    assert_eq!(counts_sum(line), 64);
    for key in line.split_whitespace().skip(1).step_by(2) {
        assert!(key == "000" || key == "111", "non-GHZ key {key}");
    }
}

#[test]
fn run_measureless_qasm_prints_statevector() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plus.qasm");
    std::fs::write(
        &path,
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\nh q[0];\n",
    )
    .unwrap();
    let out = qac().args(["run", path.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    let stdout = stdout_str(&out);
    assert!(stdout.starts_with("statevector 0.7071067811865476 0 0.7071067811865476 0"));
}

#[test]
fn bma_is_deterministic_and_emits_event_lines() {
    let run = || {
        let out = qac()
            .args([
                "bma", "--table", &demo("twelve.json"), "--start", "C", "--loops", "10",
                "--seed", "7",
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr_str(&out));
        stdout_str(&out)
    };
    let first = run();
    assert_eq!(first, run(), "same seed must give byte-identical output");
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines.len(), 10);
    assert!(lines[0].starts_with("0,"), "first event at t=0: {}", lines[0]);
    assert!(lines[1].starts_with("150,"));
    for line in &lines {
        assert_eq!(line.split(',').count(), 5, "line shape: {line}");
    }
}

#[test]
fn bma_unknown_start_label_fails() {
    let out = qac()
        .args([
            "bma", "--table", &demo("twelve.json"), "--start", "H", "--loops", "3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("[qac:error]"));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = qac()
        .args([
            "bench", "--shots", "200,400", "--csv", csv.to_str().unwrap(), "--reps", "3",
            "--seed", "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "shots,median_ms,min_ms,max_ms");
    assert_eq!(lines.len(), 3);
    assert_eq!(stdout_str(&out), text, "stdout mirrors the CSV");
}

#[test]
fn bench_without_shots_is_usage_error() {
    let out = qac()
        .args(["bench", "--csv", "/tmp/never-written.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = qac().args(["repl", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("--bogus"));
}

#[test]
fn missing_file_is_runtime_error() {
    let out = qac().args(["run", "/no/such/file.qac"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("[qac:error]"));
}

#[test]
fn bad_script_line_is_runtime_error_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.qac");
    std::fs::write(&path, "QuantumCircuit q 1 1\nq frob 0\n").unwrap();
    let out = qac().args(["run", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_str(&out);
    assert!(err.contains("line 2"), "stderr: {err}");
}

#[test]
fn repl_continues_after_errors() {
    let mut child = qac()
        .args(["repl", "--seed", "3", "--quiet"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(
            b"QuantumCircuit q 1 1\nq frob 0\nq h 0, q m 0 0\nSimulator s q 12\ns get_counts\nexit\n",
        )
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let stdout = stdout_str(&out);
    assert_eq!(counts_sum(stdout.lines().next().unwrap()), 12);
    assert!(stderr_str(&out).contains("[qac:error]"), "bad gate must be reported");
}

#[test]
fn quiet_suppresses_info_but_not_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.qac");
    std::fs::write(&path, "QuantumCircuit q 1 1\nset console_output 1\nQuantumCircuit q 1 1\n").unwrap();
    // without --quiet: circuit re-creation logs an info line
    let loud = qac().args(["run", path.to_str().unwrap()]).output().unwrap();
    assert!(loud.status.success());
    assert!(stderr_str(&loud).contains("[qac:info]"));
    // with --quiet the same script stays silent on stderr... until the
    // script itself re-enables console output, so use a failing one
    let bad = dir.path().join("bad.qac");
    std::fs::write(&bad, "Simulator s nope 5\n").unwrap();
    let out = qac()
        .args(["run", bad.to_str().unwrap(), "--quiet"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("[qac:error]"));
}

#[test]
fn super_prints_quantized_values_and_ramp() {
    let out = qac()
        .args([
            "super", "--qubits", "3", "--ramp", "100", "--steps", "4", "--triggers", "2",
            "--seed", "6",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let stdout = stdout_str(&out);
    let triggers: Vec<&str> = stdout.lines().filter(|l| l.starts_with("trigger")).collect();
    assert_eq!(triggers.len(), 2);
    let steps: Vec<&str> = stdout.lines().filter(|l| l.trim_start().starts_with("t=")).collect();
    assert_eq!(steps.len(), 10, "5 interpolation samples per trigger");
    let rerun = qac()
        .args([
            "super", "--qubits", "3", "--ramp", "100", "--steps", "4", "--triggers", "2",
            "--seed", "6",
        ])
        .output()
        .unwrap();
    assert_eq!(stdout, stdout_str(&rerun));
}

#[test]
fn serve_subcommand_answers_osc_requests() {
    // reserve a port, free it, and hope nothing grabs it in between;
    // retry once on a second port to keep this robust
    for attempt in 0..2 {
        let sock = std::net::UdpSocket::bind("127.0.0.1:0").unwrap();
        let port = sock.local_addr().unwrap().port();
        drop(sock);
        let mut child = qac()
            .args([
                "serve", "--port", &port.to_string(), "--reply-to-source", "--seed", "4",
            ])
            .stderr(Stdio::piped())
            .spawn()
            .unwrap();
        std::thread::sleep(std::time::Duration::from_millis(300));
        let target = format!("127.0.0.1:{port}").parse().unwrap();
        let qasm = std::fs::read_to_string(demo("bell.qasm")).unwrap();
        let result = qac_core::osc::service::client_request(target, &qasm, Some(256), 2_000, None);
        child.kill().unwrap();
        let _ = child.wait();
        match result {
            Ok(counts) => {
                assert_eq!(counts.total(), 256);
                return;
            }
            Err(e) if attempt == 0 => {
                eprintln!("first serve attempt failed ({e}), retrying on a fresh port");
            }
            Err(e) => panic!("serve round-trip failed twice: {e}"),
        }
    }
}

#[test]
fn version_flag_exits_zero() {
    let out = qac().arg("--version").output().unwrap();
    assert!(out.status.success());
    assert!(stdout_str(&out).starts_with("qac "));
}
