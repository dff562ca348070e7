//! Command-line front end: interactive sessions, script/QASM/minified
//! execution, the Markov sequencer, the OSC service, the shots
//! benchmark, and the superposition control demo.

use std::fs;
use std::io::{self, BufRead, Write};
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{render_csv, run_bench, BenchSource, BenchSpec};
use crate::bma::{run_sequencer, SequencerConfig, TransitionTable};
use crate::circuit::QuantumCircuit;
use crate::control::SuperpositionDevice;
use crate::error::{QacError, Result};
use crate::lang::minified::parse_minified;
use crate::osc::service::{serve, ServiceConfig};
use crate::qasm::parse_qasm;
use crate::sampling::sample_counts;
use crate::session::Session;
use crate::statevector::run_statevector;

#[derive(Parser, Debug)]
#[command(
    name = "qac",
    version,
    about = "Quantum-circuit construction and sampling engine for realtime creative workflows"
)]
pub struct Cli {
    /// Seed for every stochastic component (falls back to QAC_SEED, then OS entropy)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Suppress info logging; errors still print
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Shot count; for `bench` a comma-separated list (e.g. 2000,20000,1000000)
    #[arg(long, global = true)]
    pub shots: Option<String>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Interactive command-language session on stdin
    Repl,
    /// Execute a session script, QASM program, or minified circuit
    Run { path: PathBuf },
    /// Markov pitch sequencer driven by amplitude amplification
    Bma {
        /// Transition table JSON
        #[arg(long)]
        table: PathBuf,
        /// Starting pitch label (must exist in the table)
        #[arg(long)]
        start: String,
        /// Number of notes to generate
        #[arg(long)]
        loops: usize,
        /// Milliseconds between scheduled note events
        #[arg(long, default_value_t = 150)]
        period_ms: u64,
    },
    /// OSC service executing QASM requests over UDP
    Serve {
        #[arg(long, default_value_t = 7400)]
        port: u16,
        #[arg(long, default_value_t = 7401)]
        reply_port: u16,
        /// Reply to each request's source address instead of the fixed reply port
        #[arg(long)]
        reply_to_source: bool,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
    },
    /// Time build+simulate+sample across shot counts, write CSV
    Bench {
        /// CSV output path
        #[arg(long)]
        csv: PathBuf,
        /// Timed repetitions per shot level
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Benchmark this QASM file instead of the built-in 1-qubit circuit
        #[arg(long)]
        qasm: Option<PathBuf>,
    },
    /// Sample a control value from an equal superposition, with optional ramping
    Super {
        #[arg(long)]
        qubits: usize,
        /// Ramp time in ms from the previous value to the new one
        #[arg(long, default_value_t = 0)]
        ramp: u64,
        /// Interpolation samples to print per trigger when ramping
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        triggers: usize,
    },
}

pub fn resolve_seed(cli_seed: Option<u64>) -> Option<u64> {
    cli_seed.or_else(|| std::env::var("QAC_SEED").ok().and_then(|v| v.parse().ok()))
}

fn parse_shots_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|part| {
            let part = part.trim();
            match part.parse::<u64>() {
                Ok(v) if v > 0 => Ok(v),
                _ => Err(QacError::Argument(format!("bad shot count '{part}'"))),
            }
        })
        .collect()
}

fn parse_single_shots(text: &str) -> Result<u64> {
    match text.trim().parse::<u64>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(QacError::Argument(format!("bad shot count '{text}'"))),
    }
}

/// How `run` should interpret a file's contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptKind {
    Qasm,
    Minified,
    Session,
}

/// Decide by extension, then content: `OPENQASM` header means QASM; a
/// leading integer means minified (session names can never be numbers,
/// so the two grammars cannot collide); anything else is a session
/// script.
pub fn sniff_script(path: &Path, content: &str) -> ScriptKind {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("qasm")) {
        return ScriptKind::Qasm;
    }
    for line in content.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("//") || line.starts_with('#') {
            continue;
        }
        if line.starts_with("OPENQASM") {
            return ScriptKind::Qasm;
        }
        if let Some(first) = line.split_whitespace().next() {
            if first.parse::<i64>().is_ok() {
                return ScriptKind::Minified;
            }
        }
        break;
    }
    ScriptKind::Session
}

fn minified_tokens(content: &str) -> Vec<String> {
    content
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split_whitespace())
        .map(str::to_string)
        .collect()
}

/// Print a circuit's result: counts when it measures, the statevector
/// when it does not.
fn print_circuit_result(
    circuit: &QuantumCircuit,
    shots: u64,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> Result<()> {
    if circuit.has_measurement() {
        let counts = sample_counts(circuit, shots, seed.unwrap_or_else(rand::random))?;
        writeln!(out, "counts {}", counts.pairs())?;
    } else {
        let sv = run_statevector(circuit)?;
        let mut line = String::from("statevector");
        for v in sv.flat_interleaved() {
            line.push(' ');
            line.push_str(&format!("{v}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("qac: {msg}");
    2
}

fn cmd_repl(seed: Option<u64>, quiet: bool) -> Result<i32> {
    let mut session = Session::new(seed, quiet);
    if !quiet {
        eprintln!("qac session — one command per line, 'exit' to leave");
    }
    let stdin = io::stdin();
    let mut line_no = 0usize;
    loop {
        if !quiet {
            eprint!("qac> ");
            let _ = io::stderr().flush();
        }
        let mut line = String::new();
        if stdin.lock().read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        let trimmed = line.trim();
        if trimmed == "exit" || trimmed == "quit" {
            break;
        }
        match session.execute_line(trimmed, line_no) {
            Ok(outputs) => {
                for output in outputs {
                    if let Some(s) = output.to_stdout() {
                        println!("{s}");
                    }
                }
            }
            Err(e) => session.registry().error(e.to_string()),
        }
    }
    Ok(0)
}

fn cmd_run(path: &Path, shots: u64, seed: Option<u64>, quiet: bool) -> Result<i32> {
    let content = fs::read_to_string(path)?;
    let mut stdout = io::stdout();
    match sniff_script(path, &content) {
        ScriptKind::Qasm => {
            let circuit = parse_qasm(&content)?;
            print_circuit_result(&circuit, shots, seed, &mut stdout)?;
        }
        ScriptKind::Minified => {
            let tokens = minified_tokens(&content);
            let circuit = parse_minified(&tokens)?.expand()?;
            print_circuit_result(&circuit, shots, seed, &mut stdout)?;
        }
        ScriptKind::Session => {
            let mut session = Session::new(seed, quiet);
            session.run_script(&content, &mut stdout)?;
        }
    }
    Ok(0)
}

fn cmd_bma(
    table_path: &Path,
    start: &str,
    loops: usize,
    period_ms: u64,
    shots: u64,
    seed: Option<u64>,
) -> Result<i32> {
    let table = TransitionTable::from_json(&fs::read_to_string(table_path)?)?;
    let config = SequencerConfig {
        start_label: start.to_string(),
        num_loops: loops,
        period_ms,
        shots,
        seed,
    };
    let run = run_sequencer(&table, &config);
    for event in &run.events {
        println!("{}", event.to_line());
    }
    if let Some(err) = run.error {
        eprintln!("[qac:error] {err}");
        return Ok(1);
    }
    Ok(0)
}

fn cmd_serve(config: ServiceConfig, quiet: bool) -> Result<i32> {
    let service = serve(config.clone())?;
    if !quiet {
        let reply = if config.reply_to_source {
            "source address".to_string()
        } else {
            format!("port {}", config.reply_port)
        };
        eprintln!(
            "[qac:info] osc service on {}:{} (replies to {reply}, default {} shots)",
            config.bind_addr,
            service.port(),
            config.default_shots
        );
    }
    loop {
        std::thread::sleep(std::time::Duration::from_secs(60));
    }
}

fn cmd_bench(spec: BenchSpec) -> Result<i32> {
    let rows = run_bench(&spec)?;
    print!("{}", render_csv(&rows));
    Ok(0)
}

fn cmd_super(
    qubits: usize,
    ramp: u64,
    steps: usize,
    triggers: usize,
    shots: u64,
    seed: Option<u64>,
) -> Result<i32> {
    let mut device = SuperpositionDevice::new(qubits, shots, ramp, seed.unwrap_or_else(rand::random))?;
    for trigger in 0..triggers {
        let (ket, value) = device.trigger()?;
        println!("trigger {trigger}: |{ket}> -> {value}");
        if ramp > 0 && steps > 0 {
            for step in 0..=steps {
                let elapsed = ramp * step as u64 / steps as u64;
                println!("  t={elapsed}ms value={:.6}", device.step_interpolation(elapsed));
            }
        }
    }
    Ok(0)
}

pub fn dispatch(cli: Cli) -> Result<i32> {
    let seed = resolve_seed(cli.seed);
    let quiet = cli.quiet;
    match cli.command {
        Cmd::Repl => cmd_repl(seed, quiet),
        Cmd::Run { path } => {
            let shots = match cli.shots.as_deref() {
                Some(s) => parse_single_shots(s)?,
                None => 1024,
            };
            cmd_run(&path, shots, seed, quiet)
        }
        Cmd::Bma {
            table,
            start,
            loops,
            period_ms,
        } => {
            let shots = match cli.shots.as_deref() {
                Some(s) => parse_single_shots(s)?,
                None => 100,
            };
            cmd_bma(&table, &start, loops, period_ms, shots, seed)
        }
        Cmd::Serve {
            port,
            reply_port,
            reply_to_source,
            bind,
        } => {
            let shots = match cli.shots.as_deref() {
                Some(s) => parse_single_shots(s)?,
                None => 1024,
            };
            let config = ServiceConfig {
                bind_addr: bind,
                listen_port: port,
                reply_port,
                reply_to_source,
                default_shots: shots,
                seed,
                ..ServiceConfig::default()
            };
            cmd_serve(config, quiet)
        }
        Cmd::Bench { csv, reps, qasm } => {
            let shots_list = match cli.shots.as_deref() {
                Some(s) => parse_shots_list(s)?,
                None => {
                    return Ok(usage_error(
                        "bench needs --shots with a comma-separated list, e.g. --shots 2000,20000,1000000",
                    ))
                }
            };
            let source = match qasm {
                Some(path) => BenchSource::Qasm(fs::read_to_string(path)?),
                None => BenchSource::BuiltinH,
            };
            let spec = BenchSpec {
                source,
                shots_list,
                repetitions: reps,
                csv_path: Some(csv),
                seed: seed.unwrap_or(0),
            };
            cmd_bench(spec)
        }
        Cmd::Super {
            qubits,
            ramp,
            steps,
            triggers,
        } => {
            let shots = match cli.shots.as_deref() {
                Some(s) => parse_single_shots(s)?,
                None => 1024,
            };
            cmd_super(qubits, ramp, steps, triggers, shots, seed)
        }
    }
}

/// Full argv-to-exit-code path; the binary just forwards to this.
pub fn cli_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("[qac:error] {e}");
            1
        }
    }
}
