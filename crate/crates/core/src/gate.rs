//! Gate vocabulary: the gate kinds the engine accepts, the single
//! operation record stored in circuits, and dense complex matrices for
//! arbitrary unitary gates.

use num_complex::Complex64;

use crate::error::{QacError, Result};

/// Elementwise tolerance for the unitarity check on matrix gates.
pub const UNITARITY_TOLERANCE: f64 = 1e-6;

/// Every gate kind the engine knows, plus the measurement pseudo-gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    T,
    Rx,
    Ry,
    Rz,
    Cx,
    Cz,
    Crx,
    Cry,
    Crz,
    Ccx,
    Cccx,
    Swap,
    Unitary,
    Measure,
}

impl GateKind {
    /// The message-language token for this kind.
    pub fn token(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Crx => "crx",
            GateKind::Cry => "cry",
            GateKind::Crz => "crz",
            GateKind::Ccx => "ccx",
            GateKind::Cccx => "cccx",
            GateKind::Swap => "swap",
            GateKind::Unitary => "unitary",
            GateKind::Measure => "m",
        }
    }

    pub fn from_token(token: &str) -> Option<GateKind> {
        Some(match token {
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "t" => GateKind::T,
            "rx" => GateKind::Rx,
            "ry" => GateKind::Ry,
            "rz" => GateKind::Rz,
            "cx" => GateKind::Cx,
            "cz" => GateKind::Cz,
            "crx" => GateKind::Crx,
            "cry" => GateKind::Cry,
            "crz" => GateKind::Crz,
            "ccx" => GateKind::Ccx,
            "cccx" => GateKind::Cccx,
            "swap" => GateKind::Swap,
            "unitary" => GateKind::Unitary,
            "m" => GateKind::Measure,
            _ => return None,
        })
    }

    /// Number of qubit operands, or `None` for `unitary` (size comes from
    /// the matrix).
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::X
            | GateKind::Y
            | GateKind::Z
            | GateKind::H
            | GateKind::S
            | GateKind::T
            | GateKind::Rx
            | GateKind::Ry
            | GateKind::Rz
            | GateKind::Measure => Some(1),
            GateKind::Cx
            | GateKind::Cz
            | GateKind::Crx
            | GateKind::Cry
            | GateKind::Crz
            | GateKind::Swap => Some(2),
            GateKind::Ccx => Some(3),
            GateKind::Cccx => Some(4),
            GateKind::Unitary => None,
        }
    }

    pub fn takes_angle(self) -> bool {
        matches!(
            self,
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Crx | GateKind::Cry | GateKind::Crz
        )
    }
}

/// Dense square complex matrix, row-major, of dimension `2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<CMatrix> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(QacError::Argument(format!(
                "matrix dimension {dim} is not a power of two"
            )));
        }
        if data.len() != dim * dim {
            return Err(QacError::Argument(format!(
                "matrix of dimension {dim} needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(QacError::Argument("matrix entries must be finite".into()));
        }
        Ok(CMatrix { dim, data })
    }

    pub fn identity(dim: usize) -> CMatrix {
        let mut m = CMatrix {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        };
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::ONE;
        }
        m
    }

    /// Build from a flat list of values as carried by the message
    /// language: either `dim^2` reals (zero imaginary parts) or
    /// `2*dim^2` interleaved re/im pairs. The two encodings never share a
    /// length, so the split is inferred from the count alone.
    pub fn from_flat_values(values: &[f64]) -> Result<CMatrix> {
        let len = values.len();
        if len >= 4 && is_square_power_of_four(len) {
            let dim = (len as f64).sqrt() as usize;
            let data = values.iter().map(|&re| Complex64::new(re, 0.0)).collect();
            return CMatrix::new(dim, data);
        }
        if len >= 8 && len % 2 == 0 && is_square_power_of_four(len / 2) {
            let dim = ((len / 2) as f64).sqrt() as usize;
            let data = values
                .chunks_exact(2)
                .map(|pair| Complex64::new(pair[0], pair[1]))
                .collect();
            return CMatrix::new(dim, data);
        }
        Err(QacError::Argument(format!(
            "unitary value list of length {len} is neither (2^k)^2 reals nor 2*(2^k)^2 interleaved re/im pairs"
        )))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// k such that dim = 2^k.
    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Max elementwise deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::ZERO;
                for k in 0..n {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                let expected = if i == j { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((acc - expected).norm());
            }
        }
        worst
    }

    pub fn check_unitary(&self) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation > UNITARITY_TOLERANCE {
            return Err(QacError::NonUnitary {
                deviation,
                tolerance: UNITARITY_TOLERANCE,
            });
        }
        Ok(())
    }
}

fn is_square_power_of_four(len: usize) -> bool {
    // len = 4^k for some k >= 1
    len.is_power_of_two() && len.trailing_zeros() % 2 == 0
}

/// One operation in a circuit: a gate application or a measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub angle: Option<f64>,
    pub matrix: Option<CMatrix>,
    pub clbit: Option<usize>,
}

impl GateOp {
    /// Validating constructor; enforces arity, operand distinctness and
    /// the presence rules for `angle`, `matrix` and `clbit`.
    pub fn new(
        kind: GateKind,
        qubits: Vec<usize>,
        angle: Option<f64>,
        matrix: Option<CMatrix>,
        clbit: Option<usize>,
    ) -> Result<GateOp> {
        match kind.arity() {
            Some(arity) if qubits.len() != arity => {
                return Err(QacError::Argument(format!(
                    "gate '{}' takes {arity} qubit(s), got {}",
                    kind.token(),
                    qubits.len()
                )));
            }
            None => {
                let m = matrix.as_ref().ok_or_else(|| {
                    QacError::Argument("unitary gate requires a matrix".into())
                })?;
                if qubits.len() != m.num_qubits() {
                    return Err(QacError::Argument(format!(
                        "matrix of dimension {} covers {} qubit(s), got {} operand(s)",
                        m.dim(),
                        m.num_qubits(),
                        qubits.len()
                    )));
                }
            }
            _ => {}
        }
        for (i, &q) in qubits.iter().enumerate() {
            if qubits[..i].contains(&q) {
                return Err(QacError::Argument(format!(
                    "gate '{}' operands must be distinct, qubit {q} repeats",
                    kind.token()
                )));
            }
        }
        if kind.takes_angle() {
            let a = angle.ok_or_else(|| {
                QacError::Argument(format!("gate '{}' requires an angle", kind.token()))
            })?;
            if !a.is_finite() {
                return Err(QacError::Argument("gate angle must be finite".into()));
            }
        } else if angle.is_some() {
            return Err(QacError::Argument(format!(
                "gate '{}' takes no angle",
                kind.token()
            )));
        }
        if kind != GateKind::Unitary && matrix.is_some() {
            return Err(QacError::Argument(format!(
                "gate '{}' takes no matrix",
                kind.token()
            )));
        }
        if kind == GateKind::Measure {
            if clbit.is_none() {
                return Err(QacError::Argument("measurement requires a classical bit".into()));
            }
        } else if clbit.is_some() {
            return Err(QacError::Argument(format!(
                "gate '{}' takes no classical bit",
                kind.token()
            )));
        }
        Ok(GateOp {
            kind,
            qubits,
            angle,
            matrix,
            clbit,
        })
    }

    pub fn single(kind: GateKind, qubit: usize) -> Result<GateOp> {
        GateOp::new(kind, vec![qubit], None, None, None)
    }

    pub fn rotation(kind: GateKind, angle: f64, qubit: usize) -> Result<GateOp> {
        GateOp::new(kind, vec![qubit], Some(angle), None, None)
    }

    pub fn controlled(kind: GateKind, control: usize, target: usize) -> Result<GateOp> {
        GateOp::new(kind, vec![control, target], None, None, None)
    }

    pub fn controlled_rotation(
        kind: GateKind,
        angle: f64,
        control: usize,
        target: usize,
    ) -> Result<GateOp> {
        GateOp::new(kind, vec![control, target], Some(angle), None, None)
    }

    pub fn unitary(matrix: CMatrix, qubits: Vec<usize>) -> Result<GateOp> {
        GateOp::new(GateKind::Unitary, qubits, None, Some(matrix), None)
    }

    pub fn measure(qubit: usize, clbit: usize) -> Result<GateOp> {
        GateOp::new(GateKind::Measure, vec![qubit], None, None, Some(clbit))
    }

    pub fn is_measurement(&self) -> bool {
        self.kind == GateKind::Measure
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_round_trip() {
        for kind in [
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::H,
            GateKind::S,
            GateKind::T,
            GateKind::Rx,
            GateKind::Ry,
            GateKind::Rz,
            GateKind::Cx,
            GateKind::Cz,
            GateKind::Crx,
            GateKind::Cry,
            GateKind::Crz,
            GateKind::Ccx,
            GateKind::Cccx,
            GateKind::Swap,
            GateKind::Unitary,
            GateKind::Measure,
        ] {
            assert_eq!(GateKind::from_token(kind.token()), Some(kind));
        }
        assert_eq!(GateKind::from_token("cnot"), None);
    }

    #[test]
    fn arity_enforced() {
        assert!(GateOp::new(GateKind::Cx, vec![0], None, None, None).is_err());
        assert!(GateOp::new(GateKind::Cx, vec![0, 0], None, None, None).is_err());
        assert!(GateOp::new(GateKind::Cx, vec![0, 1], None, None, None).is_ok());
        assert!(GateOp::new(GateKind::H, vec![0], Some(1.0), None, None).is_err());
        assert!(GateOp::new(GateKind::Rx, vec![0], None, None, None).is_err());
        assert!(GateOp::new(GateKind::Rx, vec![0], Some(f64::NAN), None, None).is_err());
    }

    #[test]
    fn flat_value_lengths() {
        // 4 reals -> 2x2, 8 values -> interleaved 2x2
        assert_eq!(CMatrix::from_flat_values(&[1.0, 0.0, 0.0, 1.0]).unwrap().dim(), 2);
        let m = CMatrix::from_flat_values(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.get(0, 0), Complex64::ONE);
        // 16 reals -> 4x4 (not interleaved 2x2: that would be 8)
        assert_eq!(CMatrix::from_flat_values(&vec![0.0; 16]).err().is_none(), true);
        assert_eq!(CMatrix::from_flat_values(&vec![0.0; 16]).unwrap().dim(), 4);
        assert!(CMatrix::from_flat_values(&vec![0.0; 6]).is_err());
        assert!(CMatrix::from_flat_values(&vec![0.0; 2]).is_err());
    }

    #[test]
    fn unitarity_deviation_detects() {
        let id = CMatrix::identity(4);
        assert_eq!(id.unitarity_deviation(), 0.0);
        let mut bad = CMatrix::identity(2);
        bad.set(0, 0, Complex64::new(1.5, 0.0));
        assert!(bad.check_unitary().is_err());
    }
}
