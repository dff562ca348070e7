//! Quantum circuit construction and simulation engine for realtime
//! creative workflows: a message-driven circuit language, seeded
//! sampling, QASM interchange, an OSC service, and a Grover-walk
//! sequencer.

pub mod bench;
pub mod bma;
pub mod circuit;
pub mod cli;
pub mod control;
pub mod error;
pub mod gate;
pub mod lang;
pub mod osc;
pub mod qasm;
pub mod registry;
pub mod sampling;
pub mod session;
pub mod statevector;

pub use circuit::{QuantumCircuit, MAX_QUBITS};
pub use error::{QacError, Result};
pub use gate::{CMatrix, GateKind, GateOp, UNITARITY_TOLERANCE};
pub use registry::{
    LogEvent, LogSink, Retrieval, Retrieved, SessionRegistry, Severity, SimulatorHandle,
};
pub use sampling::{
    binstr2dec, classical_distribution, dec2binstr, sample_counts, sample_counts_with_rng,
    sample_memory, sample_memory_with_rng, seeded_rng, Counts, KeyDistribution, ShotMemory,
};
pub use statevector::{run_statevector, Statevector};
