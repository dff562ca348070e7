//! Dense statevector simulation. Amplitudes are indexed so that qubit 0
//! is the least-significant bit of the basis index. Every gate reduces to
//! one of three kernels: a multi-controlled single-qubit update, a swap,
//! or a dense k-qubit matrix applied by gather/scatter.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::circuit::QuantumCircuit;
use crate::error::{QacError, Result};
use crate::gate::{CMatrix, GateKind, GateOp};

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// 2x2 matrix for a single-qubit gate kind (for controlled rotations,
/// the matrix applied to the target when all controls are set).
pub fn base_matrix_1q(kind: GateKind, angle: Option<f64>) -> Option<Matrix2> {
    let i = Complex64::I;
    let one = Complex64::ONE;
    let zero = Complex64::ZERO;
    let m = match kind {
        GateKind::X | GateKind::Cx | GateKind::Ccx | GateKind::Cccx => [[zero, one], [one, zero]],
        GateKind::Y => [[zero, -i], [i, zero]],
        GateKind::Z | GateKind::Cz => {
            [[one, zero], [zero, -one]]
        }
        GateKind::H => {
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        GateKind::S => [[one, zero], [zero, i]],
        GateKind::T => [[one, zero], [zero, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
        GateKind::Rx | GateKind::Crx => {
            let half = angle? / 2.0;
            let (c, s) = (Complex64::new(half.cos(), 0.0), Complex64::new(0.0, -half.sin()));
            [[c, s], [s, c]]
        }
        GateKind::Ry | GateKind::Cry => {
            let half = angle? / 2.0;
            let (c, s) = (Complex64::new(half.cos(), 0.0), Complex64::new(half.sin(), 0.0));
            [[c, -s], [s, c]]
        }
        GateKind::Rz | GateKind::Crz => {
            let half = angle? / 2.0;
            [
                [Complex64::from_polar(1.0, -half), zero],
                [zero, Complex64::from_polar(1.0, half)],
            ]
        }
        GateKind::Swap | GateKind::Unitary | GateKind::Measure => return None,
    };
    Some(m)
}

impl Statevector {
    /// The all-zeros computational basis state |0...0>.
    pub fn zero(num_qubits: usize) -> Statevector {
        let mut amps = vec![Complex64::ZERO; 1 << num_qubits];
        amps[0] = Complex64::ONE;
        Statevector { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Flat [re, im, re, im, ...] in basis order.
    pub fn flat_interleaved(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.amps.len() * 2);
        for a in &self.amps {
            out.push(a.re);
            out.push(a.im);
        }
        out
    }

    /// Apply a single-qubit matrix to `target`, gated on every qubit in
    /// `controls` being 1. With no controls this is a plain 1q gate.
    pub fn apply_mc1q(&mut self, controls: &[usize], u: &Matrix2, target: usize) {
        let t_mask = 1usize << target;
        let c_mask: usize = controls.iter().map(|&c| 1usize << c).sum();
        for i in 0..self.amps.len() {
            if i & t_mask == 0 && i & c_mask == c_mask {
                let j = i | t_mask;
                let a0 = self.amps[i];
                let a1 = self.amps[j];
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[j] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) {
        let ma = 1usize << a;
        let mb = 1usize << b;
        for i in 0..self.amps.len() {
            // visit each pair once: a-bit set, b-bit clear
            if i & ma != 0 && i & mb == 0 {
                let j = (i & !ma) | mb;
                self.amps.swap(i, j);
            }
        }
    }

    /// Apply a dense 2^k matrix to the listed qubits. `qubits[0]` is the
    /// least-significant bit of the matrix's row/column index.
    pub fn apply_unitary(&mut self, m: &CMatrix, qubits: &[usize]) {
        let k = qubits.len();
        let dim = 1usize << k;
        debug_assert_eq!(m.dim(), dim);
        let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
        // offset of each sub-index within a base index
        let offsets: Vec<usize> = (0..dim)
            .map(|sub| {
                let mut off = 0usize;
                for (bit, &q) in qubits.iter().enumerate() {
                    if sub >> bit & 1 == 1 {
                        off |= 1 << q;
                    }
                }
                off
            })
            .collect();
        let mut gathered = vec![Complex64::ZERO; dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for sub in 0..dim {
                gathered[sub] = self.amps[base | offsets[sub]];
            }
            for row in 0..dim {
                let mut acc = Complex64::ZERO;
                for col in 0..dim {
                    acc += m.get(row, col) * gathered[col];
                }
                self.amps[base | offsets[row]] = acc;
            }
        }
    }

    /// Apply one circuit op. Measurements are ignored here: the
    /// statevector path tracks amplitudes only, and sampling projects
    /// through the measurement map separately.
    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        match op.kind {
            GateKind::Measure => Ok(()),
            GateKind::Swap => {
                self.apply_swap(op.qubits[0], op.qubits[1]);
                Ok(())
            }
            GateKind::Unitary => {
                let m = op
                    .matrix
                    .as_ref()
                    .ok_or_else(|| QacError::Argument("unitary op lost its matrix".into()))?;
                self.apply_unitary(m, &op.qubits);
                Ok(())
            }
            kind => {
                let u = base_matrix_1q(kind, op.angle)
                    .ok_or_else(|| QacError::Argument(format!("no 1q matrix for '{}'", kind.token())))?;
                let (controls, target) = op.qubits.split_at(op.qubits.len() - 1);
                self.apply_mc1q(controls, &u, target[0]);
                Ok(())
            }
        }
    }
}

/// Run every gate of the circuit (measurements skipped) from |0...0>.
pub fn run_statevector(circuit: &QuantumCircuit) -> Result<Statevector> {
    let mut sv = Statevector::zero(circuit.num_qubits());
    for op in circuit.ops() {
        sv.apply_gate(op)?;
    }
    Ok(sv)
}
