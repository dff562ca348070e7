//! Named circuit and simulator lifecycle. A session holds circuits and
//! simulator handles by name, logs console-style messages, and serves
//! retrievals. Failed operations never leave partial state behind.

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use crate::circuit::QuantumCircuit;
use crate::error::{QacError, Result};
use crate::gate::{CMatrix, GateKind, GateOp};
use crate::sampling::{
    sample_counts_with_rng, sample_memory_with_rng, seeded_rng, Counts, ShotMemory,
};
use crate::statevector::{run_statevector, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Info,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEvent {
    pub severity: Severity,
    pub text: String,
}

/// Where log lines go: straight to standard error, or collected in
/// memory (used by tests and the OSC service's /info relay).
#[derive(Debug)]
pub enum LogSink {
    Stderr,
    Memory(Vec<LogEvent>),
}

impl LogSink {
    fn emit(&mut self, severity: Severity, text: String) {
        match self {
            LogSink::Stderr => {
                let tag = match severity {
                    Severity::Info => "info",
                    Severity::Error => "error",
                };
                eprintln!("[qac:{tag}] {text}");
            }
            LogSink::Memory(events) => events.push(LogEvent { severity, text }),
        }
    }
}

#[derive(Debug)]
struct CircuitEntry {
    circuit: QuantumCircuit,
    /// Bumped each time the name is re-created; lets handles tell an
    /// edited circuit (same epoch) from a replaced one.
    epoch: u64,
}

#[derive(Debug)]
pub struct SimulatorHandle {
    pub source_circuit: String,
    snapshot: QuantumCircuit,
    epoch: u64,
    pub shots: u64,
    pub sim_update: bool,
    rng: ChaCha8Rng,
    detached: bool,
    warned_detached: bool,
}

/// What a retrieval asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Retrieval {
    Counts,
    Memory,
    Statevector,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Retrieved {
    Counts(Counts),
    Memory(ShotMemory),
    Statevector(Statevector),
}

#[derive(Debug)]
pub struct SessionRegistry {
    circuits: BTreeMap<String, CircuitEntry>,
    simulators: BTreeMap<String, SimulatorHandle>,
    console_output: bool,
    log: LogSink,
    default_seed: Option<u64>,
}

impl Default for SessionRegistry {
    fn default() -> Self {
        SessionRegistry::new()
    }
}

/// Names are bare tokens; integers are excluded so the repeating
/// circuit-creation message stays unambiguous.
pub fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(QacError::Argument(format!("'{name}' is not a valid name")));
    }
    if name.parse::<i64>().is_ok() {
        return Err(QacError::Argument(format!(
            "'{name}' cannot be used as a name: it reads as a number"
        )));
    }
    Ok(())
}

impl SessionRegistry {
    pub fn new() -> SessionRegistry {
        SessionRegistry {
            circuits: BTreeMap::new(),
            simulators: BTreeMap::new(),
            console_output: true,
            log: LogSink::Stderr,
            default_seed: None,
        }
    }

    pub fn with_log_sink(mut self, sink: LogSink) -> SessionRegistry {
        self.log = sink;
        self
    }

    /// Seed for simulator handles created without an explicit seed.
    /// Unset, each handle draws a fresh nondeterministic seed.
    pub fn with_default_seed(mut self, seed: Option<u64>) -> SessionRegistry {
        self.default_seed = seed;
        self
    }

    pub fn set_console_output(&mut self, on: bool) {
        self.console_output = on;
    }

    pub fn console_output(&self) -> bool {
        self.console_output
    }

    /// Drain collected events when the sink is in-memory.
    pub fn take_log_events(&mut self) -> Vec<LogEvent> {
        match &mut self.log {
            LogSink::Memory(events) => std::mem::take(events),
            LogSink::Stderr => Vec::new(),
        }
    }

    pub fn info(&mut self, text: impl Into<String>) {
        if self.console_output {
            self.log.emit(Severity::Info, text.into());
        }
    }

    pub fn error(&mut self, text: impl Into<String>) {
        self.log.emit(Severity::Error, text.into());
    }

    pub fn circuit(&self, name: &str) -> Result<&QuantumCircuit> {
        self.circuits
            .get(name)
            .map(|e| &e.circuit)
            .ok_or_else(|| QacError::UnknownName(name.to_string()))
    }

    pub fn circuit_names(&self) -> Vec<&str> {
        self.circuits.keys().map(String::as_str).collect()
    }

    pub fn simulator_names(&self) -> Vec<&str> {
        self.simulators.keys().map(String::as_str).collect()
    }

    pub fn simulator(&self, name: &str) -> Result<&SimulatorHandle> {
        self.simulators
            .get(name)
            .ok_or_else(|| QacError::UnknownName(name.to_string()))
    }

    /// Create (or reset) one circuit per spec tuple. All specs are
    /// validated before any circuit is touched.
    pub fn create_circuits(&mut self, specs: &[(String, usize, Option<usize>)]) -> Result<()> {
        let mut built = Vec::with_capacity(specs.len());
        for (name, nq, nc) in specs {
            check_name(name)?;
            built.push((name.clone(), QuantumCircuit::new(*nq, nc.unwrap_or(0))?));
        }
        for (name, circuit) in built {
            let nq = circuit.num_qubits();
            let nc = circuit.num_clbits();
            match self.circuits.get_mut(&name) {
                Some(entry) => {
                    entry.circuit = circuit;
                    entry.epoch += 1;
                    self.info(format!(
                        "reset circuit '{name}' ({nq} qubit(s), {nc} classical bit(s))"
                    ));
                }
                None => {
                    self.circuits.insert(
                        name.clone(),
                        CircuitEntry { circuit, epoch: 0 },
                    );
                    self.info(format!(
                        "created circuit '{name}' ({nq} qubit(s), {nc} classical bit(s))"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Append one gate given its message-language token and numeric
    /// arguments. Rotations expect the angle first, measurements take
    /// qubit then classical bit, `unitary` takes the flat matrix values
    /// and lands on qubits 0..k-1.
    pub fn append_gate(&mut self, circuit_name: &str, token: &str, args: &[f64]) -> Result<()> {
        let kind = GateKind::from_token(token)
            .ok_or_else(|| QacError::Argument(format!("unknown gate '{token}'")))?;
        let op = build_gate_op(kind, args)?;
        let entry = self
            .circuits
            .get_mut(circuit_name)
            .ok_or_else(|| QacError::UnknownName(circuit_name.to_string()))?;
        entry.circuit.append(op)?;
        self.info(format!("appended {token} to '{circuit_name}'"));
        Ok(())
    }

    /// Append the contents of `src_name` to `dst_name` (both may be the
    /// same name; the ops double).
    pub fn compose_circuits(&mut self, dst_name: &str, src_name: &str) -> Result<()> {
        // clone src first so dst == src works and failures stay atomic
        let src = self.circuit(src_name)?.clone();
        let entry = self
            .circuits
            .get_mut(dst_name)
            .ok_or_else(|| QacError::UnknownName(dst_name.to_string()))?;
        entry.circuit.compose(&src)?;
        self.info(format!("added '{src_name}' to '{dst_name}'"));
        Ok(())
    }

    pub fn create_simulator(
        &mut self,
        name: &str,
        circuit_name: &str,
        shots: u64,
        sim_update: bool,
        seed: Option<u64>,
    ) -> Result<()> {
        check_name(name)?;
        if shots == 0 {
            return Err(QacError::Argument("shot count must be at least 1".into()));
        }
        let entry = self
            .circuits
            .get(circuit_name)
            .ok_or_else(|| QacError::UnknownName(circuit_name.to_string()))?;
        let seed = seed
            .or(self.default_seed)
            .unwrap_or_else(|| rand::rng().next_u64());
        let handle = SimulatorHandle {
            source_circuit: circuit_name.to_string(),
            snapshot: entry.circuit.clone(),
            epoch: entry.epoch,
            shots,
            sim_update,
            rng: seeded_rng(seed),
            detached: false,
            warned_detached: false,
        };
        let reset = self.simulators.insert(name.to_string(), handle).is_some();
        self.info(format!(
            "{} simulator '{name}' over '{circuit_name}' ({shots} shots{})",
            if reset { "reset" } else { "created" },
            if sim_update { ", auto-update" } else { "" },
        ));
        Ok(())
    }

    /// Refresh an auto-updating handle's snapshot from its source
    /// circuit. If the source was re-created since the handle was made,
    /// the handle detaches: it keeps its last snapshot and a warning is
    /// logged once.
    fn refresh(&mut self, sim_name: &str) -> Result<()> {
        let handle = self
            .simulators
            .get_mut(sim_name)
            .ok_or_else(|| QacError::UnknownName(sim_name.to_string()))?;
        if !handle.sim_update || handle.detached {
            return Ok(());
        }
        match self.circuits.get(&handle.source_circuit) {
            Some(entry) if entry.epoch == handle.epoch => {
                handle.snapshot = entry.circuit.clone();
                Ok(())
            }
            _ => {
                handle.detached = true;
                let warn = !handle.warned_detached;
                handle.warned_detached = true;
                let src = handle.source_circuit.clone();
                if warn {
                    self.error(format!(
                        "warning: simulator '{sim_name}' detached: circuit '{src}' was re-created; keeping the last snapshot"
                    ));
                }
                Ok(())
            }
        }
    }

    /// Snapshot (refreshed per the auto-update policy) plus the handle's
    /// shot count; used by the QASM/code exports.
    pub fn snapshot(&mut self, sim_name: &str) -> Result<(QuantumCircuit, u64)> {
        self.refresh(sim_name)?;
        let handle = self.simulator(sim_name)?;
        Ok((handle.snapshot.clone(), handle.shots))
    }

    /// Run a retrieval. Counts and memory draw fresh samples from the
    /// handle's generator stream each call; the statevector is
    /// deterministic and leaves the stream untouched.
    pub fn retrieve(&mut self, sim_name: &str, what: Retrieval) -> Result<Retrieved> {
        self.refresh(sim_name)?;
        let handle = self
            .simulators
            .get_mut(sim_name)
            .ok_or_else(|| QacError::UnknownName(sim_name.to_string()))?;
        match what {
            Retrieval::Counts => {
                let counts = sample_counts_with_rng(&handle.snapshot, handle.shots, &mut handle.rng)?;
                let keys = counts.len();
                self.info(format!("simulated '{sim_name}': counts over {keys} key(s)"));
                Ok(Retrieved::Counts(counts))
            }
            Retrieval::Memory => {
                let memory = sample_memory_with_rng(&handle.snapshot, handle.shots, &mut handle.rng)?;
                let n = memory.len();
                self.info(format!("simulated '{sim_name}': {n} shot record(s)"));
                Ok(Retrieved::Memory(memory))
            }
            Retrieval::Statevector => {
                let sv = run_statevector(&handle.snapshot)?;
                Ok(Retrieved::Statevector(sv))
            }
        }
    }
}

/// Numeric argument to a qubit/clbit index.
fn index_arg(kind: GateKind, value: f64) -> Result<usize> {
    if value.fract() != 0.0 || value < 0.0 || value > u32::MAX as f64 {
        return Err(QacError::Argument(format!(
            "gate '{}' expects a nonnegative integer index, got {value}",
            kind.token()
        )));
    }
    Ok(value as usize)
}

/// Build a GateOp from message-language numeric arguments.
pub fn build_gate_op(kind: GateKind, args: &[f64]) -> Result<GateOp> {
    match kind {
        GateKind::Unitary => {
            let matrix = CMatrix::from_flat_values(args)?;
            let qubits = (0..matrix.num_qubits()).collect();
            GateOp::unitary(matrix, qubits)
        }
        GateKind::Measure => {
            if args.len() != 2 {
                return Err(QacError::Argument(format!(
                    "gate 'm' takes 2 arguments (qubit, classical bit), got {}",
                    args.len()
                )));
            }
            GateOp::measure(index_arg(kind, args[0])?, index_arg(kind, args[1])?)
        }
        kind if kind.takes_angle() => {
            let arity = kind.arity().unwrap();
            if args.len() != arity + 1 {
                return Err(QacError::Argument(format!(
                    "gate '{}' takes {} arguments (angle then {arity} qubit(s)), got {}",
                    kind.token(),
                    arity + 1,
                    args.len()
                )));
            }
            let angle = args[0];
            if !angle.is_finite() {
                return Err(QacError::Argument("gate angle must be finite".into()));
            }
            let qubits = args[1..]
                .iter()
                .map(|&a| index_arg(kind, a))
                .collect::<Result<Vec<_>>>()?;
            GateOp::new(kind, qubits, Some(angle), None, None)
        }
        kind => {
            let arity = kind.arity().unwrap();
            if args.len() != arity {
                return Err(QacError::Argument(format!(
                    "gate '{}' takes {arity} argument(s), got {}",
                    kind.token(),
                    args.len()
                )));
            }
            let qubits = args
                .iter()
                .map(|&a| index_arg(kind, a))
                .collect::<Result<Vec<_>>>()?;
            GateOp::new(kind, qubits, None, None, None)
        }
    }
}
