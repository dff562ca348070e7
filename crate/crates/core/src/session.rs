//! Session executor: applies parsed commands to a registry and shapes
//! retrieval results into the engine's stdout message formats.

use std::io::Write;

use crate::error::Result;
use crate::lang::command::{parse_command, split_message_groups, strip_comment, Command, RetrieveKind};
use crate::qasm::{emit_framework_code, emit_qasm};
use crate::registry::{LogSink, Retrieval, Retrieved, SessionRegistry};
use crate::sampling::{Counts, ShotMemory};
use crate::statevector::Statevector;

#[derive(Debug, Clone, PartialEq)]
pub enum SessionOutput {
    /// Command acknowledged; nothing to print.
    None,
    Counts(Counts),
    Memory(ShotMemory),
    Statevector(Statevector),
    /// QASM or framework-script text. With `textbox` the text is one
    /// payload for a receiving text field; on stdout both print alike.
    Code { text: String, textbox: bool },
}

impl SessionOutput {
    /// Render for stdout: `counts <pairs>`, `memory <k...>`,
    /// `statevector <re im ...>`, or the code text itself.
    pub fn to_stdout(&self) -> Option<String> {
        match self {
            SessionOutput::None => None,
            SessionOutput::Counts(c) => Some(format!("counts {}", c.pairs())),
            SessionOutput::Memory(m) => Some(format!("memory {}", m.join(" "))),
            SessionOutput::Statevector(sv) => {
                let mut out = String::from("statevector");
                for v in sv.flat_interleaved() {
                    out.push(' ');
                    out.push_str(&format!("{v}"));
                }
                Some(out)
            }
            SessionOutput::Code { text, .. } => Some(text.trim_end().to_string()),
        }
    }
}

pub struct Session {
    registry: SessionRegistry,
}

impl Session {
    pub fn new(seed: Option<u64>, quiet: bool) -> Session {
        let mut registry = SessionRegistry::new().with_default_seed(seed);
        if quiet {
            registry.set_console_output(false);
        }
        Session { registry }
    }

    /// A session collecting log events instead of writing to stderr.
    pub fn with_memory_log(seed: Option<u64>) -> Session {
        Session {
            registry: SessionRegistry::new()
                .with_default_seed(seed)
                .with_log_sink(LogSink::Memory(Vec::new())),
        }
    }

    pub fn registry(&mut self) -> &mut SessionRegistry {
        &mut self.registry
    }

    pub fn execute(&mut self, cmd: &Command) -> Result<SessionOutput> {
        match cmd {
            Command::CreateCircuits(specs) => {
                self.registry.create_circuits(specs)?;
                Ok(SessionOutput::None)
            }
            Command::AppendGate { circuit, gate, args } => {
                self.registry.append_gate(circuit, gate, args)?;
                Ok(SessionOutput::None)
            }
            Command::Compose { dst, src } => {
                self.registry.compose_circuits(dst, src)?;
                Ok(SessionOutput::None)
            }
            Command::CreateSimulator {
                name,
                circuit,
                shots,
                sim_update,
            } => {
                self.registry
                    .create_simulator(name, circuit, *shots, *sim_update, None)?;
                Ok(SessionOutput::None)
            }
            Command::Retrieve {
                simulator,
                what,
                textbox,
            } => match what {
                RetrieveKind::Counts => match self.registry.retrieve(simulator, Retrieval::Counts)? {
                    Retrieved::Counts(c) => Ok(SessionOutput::Counts(c)),
                    _ => unreachable!(),
                },
                RetrieveKind::Memory => match self.registry.retrieve(simulator, Retrieval::Memory)? {
                    Retrieved::Memory(m) => Ok(SessionOutput::Memory(m)),
                    _ => unreachable!(),
                },
                RetrieveKind::Statevector => {
                    match self.registry.retrieve(simulator, Retrieval::Statevector)? {
                        Retrieved::Statevector(sv) => Ok(SessionOutput::Statevector(sv)),
                        _ => unreachable!(),
                    }
                }
                RetrieveKind::Qasm => {
                    let (snapshot, _) = self.registry.snapshot(simulator)?;
                    Ok(SessionOutput::Code {
                        text: emit_qasm(&snapshot)?,
                        textbox: *textbox,
                    })
                }
                RetrieveKind::Qiskit => {
                    let (snapshot, shots) = self.registry.snapshot(simulator)?;
                    Ok(SessionOutput::Code {
                        text: emit_framework_code(&snapshot, shots),
                        textbox: *textbox,
                    })
                }
            },
            Command::SetConsoleOutput(on) => {
                self.registry.set_console_output(*on);
                Ok(SessionOutput::None)
            }
        }
    }

    /// Execute one text line: comment stripped, comma groups in order.
    /// Stops at the first failing group.
    pub fn execute_line(&mut self, line: &str, line_no: usize) -> Result<Vec<SessionOutput>> {
        let mut outputs = Vec::new();
        for group in split_message_groups(strip_comment(line)) {
            let cmd = parse_command(&group).map_err(|e| e.at_line(line_no))?;
            outputs.push(self.execute(&cmd).map_err(|e| e.at_line(line_no))?);
        }
        Ok(outputs)
    }

    /// Run a whole script, writing each printable output as one line.
    /// The first error aborts (after being logged to the error channel).
    pub fn run_script(&mut self, text: &str, out: &mut dyn Write) -> Result<()> {
        for (idx, line) in text.lines().enumerate() {
            match self.execute_line(line, idx + 1) {
                Ok(outputs) => {
                    for output in outputs {
                        if let Some(s) = output.to_stdout() {
                            writeln!(out, "{s}")?;
                        }
                    }
                }
                Err(e) => {
                    self.registry.error(e.to_string());
                    return Err(e);
                }
            }
        }
        Ok(())
    }
}

/// The canonical demo session: two 1-qubit circuits, superposition on
/// one, measurement on the other, composition, a 127-shot simulator,
/// then counts and a QASM export.
pub const DEMO_SCRIPT: &str = "\
# two one-qubit circuits, each with one classical bit
QuantumCircuit qc 1 1 qw 1 1
qc h 0, qw m 0 0
# fold the measuring circuit into the main one
qc add qw
Simulator sim qc 127
sim get_counts
sim get_qasm
";
