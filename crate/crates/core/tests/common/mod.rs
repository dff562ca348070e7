//! Reference machinery for the acceptance suite: a dense-matrix
//! simulator written from first principles (full 2^n operators, no
//! shared code with the engine's pairwise-update kernel), plus
//! generators for random circuits and Gram-Schmidt random unitaries.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qac_core::gate::{CMatrix, GateKind, GateOp};
use qac_core::QuantumCircuit;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Column-action description of a gate: its own 2x2 tables, written
/// down separately from the engine's.
fn base_2x2(kind: GateKind, angle: Option<f64>) -> Option<[[C; 2]; 2]> {
    let r = 0.5_f64.sqrt();
    Some(match kind {
        GateKind::X | GateKind::Cx | GateKind::Ccx | GateKind::Cccx => {
            [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
        }
        GateKind::Y => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        GateKind::Z | GateKind::Cz => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        GateKind::H => [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]],
        GateKind::S => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
        GateKind::T => [
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(r, r)],
        ],
        GateKind::Rx | GateKind::Crx => {
            let half = angle.unwrap() / 2.0;
            [
                [c(half.cos(), 0.0), c(0.0, -half.sin())],
                [c(0.0, -half.sin()), c(half.cos(), 0.0)],
            ]
        }
        GateKind::Ry | GateKind::Cry => {
            let half = angle.unwrap() / 2.0;
            [
                [c(half.cos(), 0.0), c(-half.sin(), 0.0)],
                [c(half.sin(), 0.0), c(half.cos(), 0.0)],
            ]
        }
        GateKind::Rz | GateKind::Crz => {
            let half = angle.unwrap() / 2.0;
            [
                [C::from_polar(1.0, -half), c(0.0, 0.0)],
                [c(0.0, 0.0), C::from_polar(1.0, half)],
            ]
        }
        GateKind::Swap | GateKind::Unitary | GateKind::Measure => return None,
    })
}

/// Full 2^n x 2^n operator for one gate, built column by column.
/// Stored row-major as rows of length `dim`.
pub struct DenseOp {
    pub dim: usize,
    pub rows: Vec<Vec<C>>,
}

impl DenseOp {
    fn zeros(dim: usize) -> DenseOp {
        DenseOp {
            dim,
            rows: vec![vec![c(0.0, 0.0); dim]; dim],
        }
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        let mut out = vec![c(0.0, 0.0); self.dim];
        for (row, out_amp) in out.iter_mut().enumerate() {
            let mut acc = c(0.0, 0.0);
            for col in 0..self.dim {
                acc += self.rows[row][col] * v[col];
            }
            *out_amp = acc;
        }
        out
    }
}

fn bit(value: usize, index: usize) -> usize {
    (value >> index) & 1
}

/// Embed one gate into the full space. Controlled kinds act on their
/// last operand, conditioned on all earlier ones.
pub fn embed_gate(num_qubits: usize, op: &GateOp) -> DenseOp {
    let dim = 1usize << num_qubits;
    let mut dense = DenseOp::zeros(dim);
    match op.kind {
        GateKind::Measure => {
            for i in 0..dim {
                dense.rows[i][i] = c(1.0, 0.0);
            }
        }
        GateKind::Swap => {
            let (a, b) = (op.qubits[0], op.qubits[1]);
            for col in 0..dim {
                let (ba, bb) = (bit(col, a), bit(col, b));
                let row = (col & !(1 << a) & !(1 << b)) | (bb << a) | (ba << b);
                dense.rows[row][col] = c(1.0, 0.0);
            }
        }
        GateKind::Unitary => {
            let matrix = op.matrix.as_ref().unwrap();
            let k = matrix.num_qubits();
            for col in 0..dim {
                let mut sub_in = 0usize;
                for (m, &q) in op.qubits.iter().enumerate().take(k) {
                    sub_in |= bit(col, q) << m;
                }
                for sub_out in 0..(1 << k) {
                    let mut row = col;
                    for (m, &q) in op.qubits.iter().enumerate().take(k) {
                        row = (row & !(1 << q)) | (bit(sub_out, m) << q);
                    }
                    let entry = matrix.get(sub_out, sub_in);
                    dense.rows[row][col] += entry;
                }
            }
        }
        kind => {
            let table = base_2x2(kind, op.angle).unwrap();
            let (controls, target) = op.qubits.split_at(op.qubits.len() - 1);
            let target = target[0];
            for col in 0..dim {
                if controls.iter().any(|&q| bit(col, q) == 0) {
                    dense.rows[col][col] = c(1.0, 0.0);
                    continue;
                }
                let in_bit = bit(col, target);
                for out_bit in 0..2 {
                    let row = (col & !(1 << target)) | (out_bit << target);
                    dense.rows[row][col] += table[out_bit][in_bit];
                }
            }
        }
    }
    dense
}

/// Run a whole circuit through the dense operators: |0..0> in, one
/// matrix-vector product per gate, measurements ignored.
pub fn dense_statevector(circuit: &QuantumCircuit) -> Vec<C> {
    let dim = 1usize << circuit.num_qubits();
    let mut v = vec![c(0.0, 0.0); dim];
    v[0] = c(1.0, 0.0);
    for op in circuit.ops() {
        if op.kind == GateKind::Measure {
            continue;
        }
        v = embed_gate(circuit.num_qubits(), op).apply(&v);
    }
    v
}

pub fn max_amplitude_delta(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Probability of each classical outcome, derived straight from the
/// dense statevector and the circuit's measurement map.
pub fn dense_outcome_probabilities(circuit: &QuantumCircuit) -> Vec<(String, f64)> {
    let v = dense_statevector(circuit);
    let n_cl = circuit.num_clbits();
    let mut table: std::collections::BTreeMap<String, f64> = Default::default();
    for (basis, amp) in v.iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let mut bits = vec![b'0'; n_cl];
        for op in circuit.ops() {
            if op.kind == GateKind::Measure {
                let q = op.qubits[0];
                let cl = op.clbit.unwrap();
                bits[n_cl - 1 - cl] = b'0' + ((basis >> q) & 1) as u8;
            }
        }
        *table.entry(String::from_utf8(bits).unwrap()).or_default() += p;
    }
    table.into_iter().collect()
}

/// Random unitary via Gram-Schmidt on a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, k: usize) -> CMatrix {
    let dim = 1usize << k;
    let mut cols: Vec<Vec<C>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut col: Vec<C> = (0..dim)
            .map(|_| c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
            .collect();
        // project out the span of the previous columns, twice for stability
        for _ in 0..2 {
            for prev in &cols {
                let overlap: C = prev.iter().zip(&col).map(|(p, x)| p.conj() * x).sum();
                for (x, p) in col.iter_mut().zip(prev) {
                    *x -= overlap * p;
                }
            }
        }
        let norm: f64 = col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 1e-8, "degenerate random draw");
        for x in &mut col {
            *x /= norm;
        }
        cols.push(col);
    }
    let mut flat = vec![c(0.0, 0.0); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for (i, &value) in col.iter().enumerate() {
            flat[i * dim + j] = value;
        }
    }
    CMatrix::new(dim, flat).expect("orthonormalized matrix is valid")
}

const SIMPLE_GATES: &[&str] = &["x", "y", "z", "h", "s", "t"];
const ROTATIONS: &[&str] = &["rx", "ry", "rz"];

/// A random measurement-free circuit. Gate population: single-qubit
/// gates, rotations, controlled families, swap, and (optionally)
/// random unitaries on the low qubits.
pub fn random_circuit(
    rng: &mut ChaCha8Rng,
    num_qubits: usize,
    num_gates: usize,
    with_unitaries: bool,
) -> QuantumCircuit {
    let mut qc = QuantumCircuit::new(num_qubits, num_qubits).unwrap();
    for _ in 0..num_gates {
        let choice = rng.random_range(0..if with_unitaries { 10 } else { 9 });
        match choice {
            0..=2 => {
                let g = SIMPLE_GATES[rng.random_range(0..SIMPLE_GATES.len())];
                let q = rng.random_range(0..num_qubits);
                append(&mut qc, g, &[q as f64]);
            }
            3..=4 => {
                let g = ROTATIONS[rng.random_range(0..ROTATIONS.len())];
                let angle = rng.random::<f64>() * std::f64::consts::TAU - std::f64::consts::PI;
                let q = rng.random_range(0..num_qubits);
                append(&mut qc, g, &[angle, q as f64]);
            }
            5..=6 if num_qubits >= 2 => {
                let (a, b) = distinct_pair(rng, num_qubits);
                let g = ["cx", "cz", "swap"][rng.random_range(0..3)];
                append(&mut qc, g, &[a as f64, b as f64]);
            }
            7 if num_qubits >= 2 => {
                let (a, b) = distinct_pair(rng, num_qubits);
                let g = ["crx", "cry", "crz"][rng.random_range(0..3)];
                let angle = rng.random::<f64>() * std::f64::consts::TAU - std::f64::consts::PI;
                append(&mut qc, g, &[angle, a as f64, b as f64]);
            }
            8 if num_qubits >= 3 => {
                let mut idx: Vec<usize> = (0..num_qubits).collect();
                for i in (1..idx.len()).rev() {
                    idx.swap(i, rng.random_range(0..=i));
                }
                if num_qubits >= 4 && rng.random::<f64>() < 0.4 {
                    qc.cccx(idx[0], idx[1], idx[2], idx[3]).unwrap();
                } else {
                    qc.ccx(idx[0], idx[1], idx[2]).unwrap();
                }
            }
            9 => {
                let k = rng.random_range(1..=3.min(num_qubits));
                let matrix = random_unitary(rng, k);
                qc.unitary(matrix, (0..k).collect()).unwrap();
            }
            _ => {
                // fallback when the roll needs more qubits than we have
                let q = rng.random_range(0..num_qubits);
                append(&mut qc, "h", &[q as f64]);
            }
        }
    }
    qc
}

fn distinct_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

fn append(qc: &mut QuantumCircuit, gate: &str, args: &[f64]) {
    match gate {
        "x" => qc.x(args[0] as usize).map(|_| ()).unwrap(),
        "y" => qc.y(args[0] as usize).map(|_| ()).unwrap(),
        "z" => qc.z(args[0] as usize).map(|_| ()).unwrap(),
        "h" => qc.h(args[0] as usize).map(|_| ()).unwrap(),
        "s" => qc.s(args[0] as usize).map(|_| ()).unwrap(),
        "t" => qc.t(args[0] as usize).map(|_| ()).unwrap(),
        "rx" => qc.rx(args[0], args[1] as usize).map(|_| ()).unwrap(),
        "ry" => qc.ry(args[0], args[1] as usize).map(|_| ()).unwrap(),
        "rz" => qc.rz(args[0], args[1] as usize).map(|_| ()).unwrap(),
        "cx" => qc.cx(args[0] as usize, args[1] as usize).map(|_| ()).unwrap(),
        "cz" => qc.cz(args[0] as usize, args[1] as usize).map(|_| ()).unwrap(),
        "swap" => qc.swap(args[0] as usize, args[1] as usize).map(|_| ()).unwrap(),
        "crx" => qc
            .crx(args[0], args[1] as usize, args[2] as usize)
            .map(|_| ())
            .unwrap(),
        "cry" => qc
            .cry(args[0], args[1] as usize, args[2] as usize)
            .map(|_| ())
            .unwrap(),
        "crz" => qc
            .crz(args[0], args[1] as usize, args[2] as usize)
            .map(|_| ())
            .unwrap(),
        other => panic!("unknown gate in generator: {other}"),
    }
}
