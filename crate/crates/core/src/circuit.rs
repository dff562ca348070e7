//! Circuit container: an ordered list of gate operations over a fixed
//! number of qubits and classical bits, validated on every append so a
//! circuit can never hold an ill-formed op.

use crate::error::{QacError, Result};
use crate::gate::{CMatrix, GateKind, GateOp};

/// Upper bound on qubit count; statevectors above this are refused.
pub const MAX_QUBITS: usize = 20;

/// Upper bound on classical bits (keys convert to u64 decimals).
pub const MAX_CLBITS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit {
    num_qubits: usize,
    num_clbits: usize,
    ops: Vec<GateOp>,
    // bit q set once qubit q has been measured; nothing may touch it after
    measured_mask: u32,
}

impl QuantumCircuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Result<QuantumCircuit> {
        if num_qubits == 0 {
            return Err(QacError::Argument(
                "circuit needs at least one qubit".into(),
            ));
        }
        if num_qubits > MAX_QUBITS {
            return Err(QacError::Range(format!(
                "qubit count {num_qubits} exceeds the maximum of {MAX_QUBITS}"
            )));
        }
        if num_clbits > MAX_CLBITS {
            return Err(QacError::Range(format!(
                "classical bit count {num_clbits} exceeds the maximum of {MAX_CLBITS}"
            )));
        }
        Ok(QuantumCircuit {
            num_qubits,
            num_clbits,
            ops: Vec::new(),
            measured_mask: 0,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn has_measurement(&self) -> bool {
        self.ops.iter().any(GateOp::is_measurement)
    }

    /// Validate an op against this circuit's dimensions and the given
    /// already-measured-qubit mask, without storing it.
    fn validate(&self, op: &GateOp, measured_mask: u32) -> Result<()> {
        for &q in &op.qubits {
            if q >= self.num_qubits {
                return Err(QacError::Range(format!(
                    "qubit index {q} out of range for a {}-qubit circuit",
                    self.num_qubits
                )));
            }
            if measured_mask & (1 << q) != 0 {
                return Err(QacError::Argument(format!(
                    "qubit {q} was already measured; measurements end a qubit's timeline"
                )));
            }
        }
        if let Some(c) = op.clbit {
            if self.num_clbits == 0 {
                return Err(QacError::NoClbits(
                    "cannot measure: circuit has no classical bits".into(),
                ));
            }
            if c >= self.num_clbits {
                return Err(QacError::Range(format!(
                    "classical bit index {c} out of range for {} classical bit(s)",
                    self.num_clbits
                )));
            }
        }
        if let Some(m) = &op.matrix {
            m.check_unitary()?;
        }
        Ok(())
    }

    /// Append a pre-built op after validating it in full.
    pub fn append(&mut self, op: GateOp) -> Result<&mut Self> {
        self.validate(&op, self.measured_mask)?;
        if op.is_measurement() {
            self.measured_mask |= 1 << op.qubits[0];
        }
        self.ops.push(op);
        Ok(self)
    }

    /// Append every op of `other` onto this circuit. `other` must fit:
    /// its qubit and classical registers may not exceed this circuit's.
    /// Nothing is appended if any check fails.
    pub fn compose(&mut self, other: &QuantumCircuit) -> Result<&mut Self> {
        if other.num_qubits > self.num_qubits {
            return Err(QacError::Composition(format!(
                "cannot add a {}-qubit circuit onto a {}-qubit circuit",
                other.num_qubits, self.num_qubits
            )));
        }
        if other.num_clbits > self.num_clbits {
            return Err(QacError::Composition(format!(
                "cannot add a circuit with {} classical bits onto one with {}",
                other.num_clbits, self.num_clbits
            )));
        }
        // dry-run the appends so a failure leaves self untouched
        let incoming: Vec<GateOp> = other.ops.clone();
        let mut mask = self.measured_mask;
        for op in &incoming {
            self.validate(op, mask)?;
            if op.is_measurement() {
                mask |= 1 << op.qubits[0];
            }
        }
        self.ops.extend(incoming);
        self.measured_mask = mask;
        Ok(self)
    }

    // --- per-gate builders -------------------------------------------------

    pub fn x(&mut self, q: usize) -> Result<&mut Self> {
        self.append(GateOp::single(GateKind::X, q)?)
    }

    pub fn y(&mut self, q: usize) -> Result<&mut Self> {
        self.append(GateOp::single(GateKind::Y, q)?)
    }

    pub fn z(&mut self, q: usize) -> Result<&mut Self> {
        self.append(GateOp::single(GateKind::Z, q)?)
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.append(GateOp::single(GateKind::H, q)?)
    }

    pub fn s(&mut self, q: usize) -> Result<&mut Self> {
        self.append(GateOp::single(GateKind::S, q)?)
    }

    pub fn t(&mut self, q: usize) -> Result<&mut Self> {
        self.append(GateOp::single(GateKind::T, q)?)
    }

    pub fn rx(&mut self, theta: f64, q: usize) -> Result<&mut Self> {
        self.append(GateOp::rotation(GateKind::Rx, theta, q)?)
    }

    pub fn ry(&mut self, theta: f64, q: usize) -> Result<&mut Self> {
        self.append(GateOp::rotation(GateKind::Ry, theta, q)?)
    }

    pub fn rz(&mut self, theta: f64, q: usize) -> Result<&mut Self> {
        self.append(GateOp::rotation(GateKind::Rz, theta, q)?)
    }

    pub fn cx(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.append(GateOp::controlled(GateKind::Cx, control, target)?)
    }

    pub fn cz(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.append(GateOp::controlled(GateKind::Cz, control, target)?)
    }

    pub fn crx(&mut self, theta: f64, control: usize, target: usize) -> Result<&mut Self> {
        self.append(GateOp::controlled_rotation(GateKind::Crx, theta, control, target)?)
    }

    pub fn cry(&mut self, theta: f64, control: usize, target: usize) -> Result<&mut Self> {
        self.append(GateOp::controlled_rotation(GateKind::Cry, theta, control, target)?)
    }

    pub fn crz(&mut self, theta: f64, control: usize, target: usize) -> Result<&mut Self> {
        self.append(GateOp::controlled_rotation(GateKind::Crz, theta, control, target)?)
    }

    pub fn ccx(&mut self, c1: usize, c2: usize, target: usize) -> Result<&mut Self> {
        self.append(GateOp::new(GateKind::Ccx, vec![c1, c2, target], None, None, None)?)
    }

    pub fn cccx(&mut self, c1: usize, c2: usize, c3: usize, target: usize) -> Result<&mut Self> {
        self.append(GateOp::new(
            GateKind::Cccx,
            vec![c1, c2, c3, target],
            None,
            None,
            None,
        )?)
    }

    pub fn swap(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.append(GateOp::new(GateKind::Swap, vec![a, b], None, None, None)?)
    }

    pub fn unitary(&mut self, matrix: CMatrix, qubits: Vec<usize>) -> Result<&mut Self> {
        self.append(GateOp::unitary(matrix, qubits)?)
    }

    pub fn m(&mut self, qubit: usize, clbit: usize) -> Result<&mut Self> {
        self.append(GateOp::measure(qubit, clbit)?)
    }

    /// Measure every qubit k into classical bit k.
    pub fn measure_all(&mut self) -> Result<&mut Self> {
        if self.num_clbits < self.num_qubits {
            return Err(QacError::Range(format!(
                "measure-all needs {} classical bits, circuit has {}",
                self.num_qubits, self.num_clbits
            )));
        }
        for k in 0..self.num_qubits {
            self.m(k, k)?;
        }
        Ok(self)
    }
}
