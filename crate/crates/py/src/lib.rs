//! Python bindings over the engine: circuit building, seeded
//! simulation, QASM/minified parsing, the Markov sequencer, and the
//! control-mapping helpers.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyList};

use qac_core::bma::{run_sequencer, SequencerConfig, TransitionTable};
use qac_core::error::QacError;
use qac_core::gate::CMatrix;
use qac_core::lang::minified::parse_minified as core_parse_minified;
use qac_core::qasm::{emit_framework_code, emit_qasm, parse_qasm as core_parse_qasm};
use qac_core::sampling::{
    sample_counts_with_rng, sample_memory_with_rng, seeded_rng,
};
use qac_core::session::Session;
use qac_core::statevector::run_statevector;
use qac_core::QuantumCircuit as CoreCircuit;

fn err_to_py(e: QacError) -> PyErr {
    match e {
        QacError::Argument(_)
        | QacError::Range(_)
        | QacError::Parse { .. }
        | QacError::UnknownName(_)
        | QacError::NonUnitary { .. }
        | QacError::Proportion { .. } => PyValueError::new_err(e.to_string()),
        QacError::Io(_) => PyIOError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn entropy_or(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

#[pyclass(name = "QuantumCircuit")]
struct PyCircuit {
    inner: CoreCircuit,
}

#[pymethods]
impl PyCircuit {
    #[new]
    #[pyo3(signature = (num_qubits, num_clbits=0))]
    fn new(num_qubits: usize, num_clbits: usize) -> PyResult<Self> {
        Ok(PyCircuit {
            inner: CoreCircuit::new(num_qubits, num_clbits).map_err(err_to_py)?,
        })
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    #[getter]
    fn num_clbits(&self) -> usize {
        self.inner.num_clbits()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "QuantumCircuit({} qubits, {} clbits, {} ops)",
            self.inner.num_qubits(),
            self.inner.num_clbits(),
            self.inner.len()
        )
    }

    fn x(&mut self, q: usize) -> PyResult<()> {
        self.inner.x(q).map(|_| ()).map_err(err_to_py)
    }
    fn y(&mut self, q: usize) -> PyResult<()> {
        self.inner.y(q).map(|_| ()).map_err(err_to_py)
    }
    fn z(&mut self, q: usize) -> PyResult<()> {
        self.inner.z(q).map(|_| ()).map_err(err_to_py)
    }
    fn h(&mut self, q: usize) -> PyResult<()> {
        self.inner.h(q).map(|_| ()).map_err(err_to_py)
    }
    fn s(&mut self, q: usize) -> PyResult<()> {
        self.inner.s(q).map(|_| ()).map_err(err_to_py)
    }
    fn t(&mut self, q: usize) -> PyResult<()> {
        self.inner.t(q).map(|_| ()).map_err(err_to_py)
    }
    fn rx(&mut self, theta: f64, q: usize) -> PyResult<()> {
        self.inner.rx(theta, q).map(|_| ()).map_err(err_to_py)
    }
    fn ry(&mut self, theta: f64, q: usize) -> PyResult<()> {
        self.inner.ry(theta, q).map(|_| ()).map_err(err_to_py)
    }
    fn rz(&mut self, theta: f64, q: usize) -> PyResult<()> {
        self.inner.rz(theta, q).map(|_| ()).map_err(err_to_py)
    }
    fn cx(&mut self, c: usize, t: usize) -> PyResult<()> {
        self.inner.cx(c, t).map(|_| ()).map_err(err_to_py)
    }
    fn cz(&mut self, c: usize, t: usize) -> PyResult<()> {
        self.inner.cz(c, t).map(|_| ()).map_err(err_to_py)
    }
    fn crx(&mut self, theta: f64, c: usize, t: usize) -> PyResult<()> {
        self.inner.crx(theta, c, t).map(|_| ()).map_err(err_to_py)
    }
    fn cry(&mut self, theta: f64, c: usize, t: usize) -> PyResult<()> {
        self.inner.cry(theta, c, t).map(|_| ()).map_err(err_to_py)
    }
    fn crz(&mut self, theta: f64, c: usize, t: usize) -> PyResult<()> {
        self.inner.crz(theta, c, t).map(|_| ()).map_err(err_to_py)
    }
    fn ccx(&mut self, a: usize, b: usize, t: usize) -> PyResult<()> {
        self.inner.ccx(a, b, t).map(|_| ()).map_err(err_to_py)
    }
    fn cccx(&mut self, a: usize, b: usize, c: usize, t: usize) -> PyResult<()> {
        self.inner.cccx(a, b, c, t).map(|_| ()).map_err(err_to_py)
    }
    fn swap(&mut self, a: usize, b: usize) -> PyResult<()> {
        self.inner.swap(a, b).map(|_| ()).map_err(err_to_py)
    }

    /// Arbitrary unitary on the lowest qubits, from a flat real list:
    /// 4^k values mean an all-real matrix, 2*4^k mean interleaved
    /// re/im pairs, row-major either way.
    fn unitary(&mut self, values: Vec<f64>) -> PyResult<()> {
        let matrix = CMatrix::from_flat_values(&values).map_err(err_to_py)?;
        let qubits: Vec<usize> = (0..matrix.num_qubits()).collect();
        self.inner.unitary(matrix, qubits).map(|_| ()).map_err(err_to_py)
    }

    fn m(&mut self, qubit: usize, clbit: usize) -> PyResult<()> {
        self.inner.m(qubit, clbit).map(|_| ()).map_err(err_to_py)
    }

    fn measure_all(&mut self) -> PyResult<()> {
        self.inner.measure_all().map(|_| ()).map_err(err_to_py)
    }

    /// Append every operation of `other` (its qubit/clbit space must fit).
    fn add(&mut self, other: &PyCircuit) -> PyResult<()> {
        self.inner.compose(&other.inner).map(|_| ()).map_err(err_to_py)
    }

    fn qasm(&self) -> PyResult<String> {
        emit_qasm(&self.inner).map_err(err_to_py)
    }
}

#[pyclass(name = "Simulator")]
struct PySimulator {
    snapshot: CoreCircuit,
    shots: u64,
    rng: rand_chacha::ChaCha8Rng,
}

#[pymethods]
impl PySimulator {
    #[new]
    #[pyo3(signature = (circuit, shots=1024, seed=None))]
    fn new(circuit: &PyCircuit, shots: u64, seed: Option<u64>) -> PyResult<Self> {
        if shots == 0 {
            return Err(PyValueError::new_err("shots must be positive"));
        }
        Ok(PySimulator {
            snapshot: circuit.inner.clone(),
            shots,
            rng: seeded_rng(entropy_or(seed)),
        })
    }

    #[getter]
    fn shots(&self) -> u64 {
        self.shots
    }

    /// Aggregated tallies; consecutive calls draw fresh shots from the
    /// simulator's random stream.
    fn get_counts(&mut self) -> PyResult<BTreeMap<String, u64>> {
        sample_counts_with_rng(&self.snapshot, self.shots, &mut self.rng)
            .map(|c| c.map().clone())
            .map_err(err_to_py)
    }

    /// Per-shot outcome strings, in draw order.
    fn get_memory(&mut self) -> PyResult<Vec<String>> {
        sample_memory_with_rng(&self.snapshot, self.shots, &mut self.rng).map_err(err_to_py)
    }

    fn get_statevector<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let sv = run_statevector(&self.snapshot).map_err(err_to_py)?;
        PyList::new(
            py,
            sv.amplitudes()
                .iter()
                .map(|a| PyComplex::from_doubles(py, a.re, a.im)),
        )
    }

    fn get_qasm(&self) -> PyResult<String> {
        emit_qasm(&self.snapshot).map_err(err_to_py)
    }

    fn get_qiskit(&self) -> String {
        emit_framework_code(&self.snapshot, self.shots)
    }
}

#[pyfunction]
fn parse_qasm(text: &str) -> PyResult<PyCircuit> {
    Ok(PyCircuit {
        inner: core_parse_qasm(text).map_err(err_to_py)?,
    })
}

/// Minified notation, e.g. "2 h0 cx01": qubit count first, then gate
/// tokens; every qubit is measured at the end.
#[pyfunction]
fn parse_minified(text: &str) -> PyResult<PyCircuit> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    Ok(PyCircuit {
        inner: core_parse_minified(&tokens)
            .and_then(|m| m.expand())
            .map_err(err_to_py)?,
    })
}

/// Run a command-language script; returns what the session printed.
#[pyfunction]
#[pyo3(signature = (text, seed=None, quiet=true))]
fn run_script(text: &str, seed: Option<u64>, quiet: bool) -> PyResult<String> {
    let mut session = Session::new(seed, quiet);
    let mut out = Vec::new();
    session.run_script(text, &mut out).map_err(err_to_py)?;
    String::from_utf8(out).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Markov sequence events as (t_ms, midi, label, state, count) tuples.
#[pyfunction]
#[pyo3(signature = (table_json, start, loops, period_ms=150, shots=100, seed=None))]
fn bma_sequence(
    table_json: &str,
    start: &str,
    loops: usize,
    period_ms: u64,
    shots: u64,
    seed: Option<u64>,
) -> PyResult<Vec<(u64, u8, String, String, u64)>> {
    let table = TransitionTable::from_json(table_json).map_err(err_to_py)?;
    let config = SequencerConfig {
        start_label: start.to_string(),
        num_loops: loops,
        period_ms,
        shots,
        seed,
    };
    let run = run_sequencer(&table, &config);
    if let Some(err) = run.error {
        return Err(err_to_py(err));
    }
    Ok(run
        .events
        .into_iter()
        .map(|e| (e.t_ms, e.midi_note, e.label, e.winning_state, e.winning_count))
        .collect())
}

#[pyfunction]
fn map_range(value: f64, in_lo: f64, in_hi: f64, out_lo: f64, out_hi: f64) -> PyResult<f64> {
    qac_core::control::map_range(value, in_lo, in_hi, out_lo, out_hi).map_err(err_to_py)
}

#[pyclass(name = "SuperpositionDevice")]
struct PySuperpositionDevice {
    inner: qac_core::control::SuperpositionDevice,
}

#[pymethods]
impl PySuperpositionDevice {
    #[new]
    #[pyo3(signature = (num_qubits, shots=1024, ramp_ms=0, seed=None))]
    fn new(num_qubits: usize, shots: u64, ramp_ms: u64, seed: Option<u64>) -> PyResult<Self> {
        Ok(PySuperpositionDevice {
            inner: qac_core::control::SuperpositionDevice::new(
                num_qubits,
                shots,
                ramp_ms,
                entropy_or(seed),
            )
            .map_err(err_to_py)?,
        })
    }

    /// Sample a fresh value; returns (winning ket, value in [0,1)).
    fn trigger(&mut self) -> PyResult<(String, f64)> {
        self.inner.trigger().map_err(err_to_py)
    }

    /// Current output while ramping, `elapsed_ms` after the trigger.
    fn step_interpolation(&mut self, elapsed_ms: u64) -> f64 {
        self.inner.step_interpolation(elapsed_ms)
    }

    #[getter]
    fn current_value(&self) -> f64 {
        self.inner.current_value()
    }

    #[getter]
    fn target_value(&self) -> f64 {
        self.inner.target_value()
    }
}

#[pyclass(name = "ProbabilityGate")]
struct PyProbabilityGate {
    inner: qac_core::control::ProbabilityGate,
}

#[pymethods]
impl PyProbabilityGate {
    #[new]
    #[pyo3(signature = (p, seed=None))]
    fn new(p: f64, seed: Option<u64>) -> Self {
        PyProbabilityGate {
            inner: qac_core::control::ProbabilityGate::new(p, entropy_or(seed)),
        }
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p()
    }

    #[setter]
    fn set_p(&mut self, p: f64) {
        self.inner.set_p(p);
    }

    /// True when the incoming event should pass.
    fn gate_event(&mut self) -> bool {
        self.inner.gate_event()
    }
}

#[pymodule]
fn qac_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircuit>()?;
    m.add_class::<PySimulator>()?;
    m.add_class::<PySuperpositionDevice>()?;
    m.add_class::<PyProbabilityGate>()?;
    m.add_function(wrap_pyfunction!(parse_qasm, m)?)?;
    m.add_function(wrap_pyfunction!(parse_minified, m)?)?;
    m.add_function(wrap_pyfunction!(run_script, m)?)?;
    m.add_function(wrap_pyfunction!(bma_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(map_range, m)?)?;
    Ok(())
}
