//! Minified circuit notation: a list of string tokens, the first being
//! the qubit count, each following token one gate. Grammar per token:
//!
//! ```text
//! <gate><q>            single-qubit, e.g. h0
//! <gate><q1><q2>...    multi-qubit, one digit per operand, e.g. cx01
//! <gate>(<angle>)<q>   rotations, radians, e.g. rx(1.5708)0
//! ```
//!
//! Gate names resolve by longest prefix match; qubit references are
//! single digits (the notation tops out at 10 qubits). The expanded
//! circuit gets one classical bit per qubit and a trailing measure-all.

use crate::circuit::QuantumCircuit;
use crate::error::{QacError, Result};
use crate::gate::GateKind;
use crate::registry::build_gate_op;

/// Gate names usable in minified tokens, longest first so prefix
/// matching is unambiguous (e.g. `cccx` before `ccx`, `swap` before `s`).
const MINIFIED_GATES: &[&str] = &[
    "cccx", "swap", "ccx", "crx", "cry", "crz", "cx", "cz", "rx", "ry", "rz", "h", "s", "t", "x",
    "y", "z",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinifiedCircuit {
    pub num_qubits: usize,
    pub tokens: Vec<String>,
}

impl MinifiedCircuit {
    pub fn expand(&self) -> Result<QuantumCircuit> {
        expand(self)
    }
}

fn token_err(index: usize, token: &str, message: impl std::fmt::Display) -> QacError {
    QacError::parse(1, index + 1, format!("token '{token}': {message}"))
}

/// Parse the token list into its structured form, validating the full
/// grammar (the expansion cannot fail afterwards except on qubit range).
pub fn parse_minified<S: AsRef<str>>(tokens: &[S]) -> Result<MinifiedCircuit> {
    let Some(first) = tokens.first() else {
        return Err(QacError::parse(1, 1, "empty circuit: missing qubit count"));
    };
    let first = first.as_ref();
    let num_qubits: usize = first
        .parse()
        .map_err(|_| token_err(0, first, "expected the qubit count"))?;
    if num_qubits == 0 {
        return Err(QacError::Argument("circuit needs at least one qubit".into()));
    }
    if num_qubits > 10 {
        return Err(QacError::Range(format!(
            "minified notation addresses qubits by single digits; {num_qubits} qubits cannot be referenced"
        )));
    }
    let mut parsed = Vec::with_capacity(tokens.len().saturating_sub(1));
    for (i, tok) in tokens.iter().enumerate().skip(1) {
        let tok = tok.as_ref();
        let (kind, angle, qubits) = parse_token(i, tok)?;
        for &q in &qubits {
            if q >= num_qubits {
                return Err(QacError::Range(format!(
                    "token '{tok}': qubit {q} out of range for {num_qubits} qubit(s)"
                )));
            }
        }
        let _ = (kind, angle);
        parsed.push(tok.to_string());
    }
    Ok(MinifiedCircuit {
        num_qubits,
        tokens: parsed,
    })
}

fn parse_token(index: usize, tok: &str) -> Result<(GateKind, Option<f64>, Vec<usize>)> {
    let name = MINIFIED_GATES
        .iter()
        .find(|g| tok.starts_with(**g))
        .ok_or_else(|| token_err(index, tok, "unknown gate name"))?;
    let kind = GateKind::from_token(name).expect("minified gate names are gate tokens");
    let mut rest = &tok[name.len()..];
    let mut angle = None;
    if kind.takes_angle() {
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.split_once(')'))
            .ok_or_else(|| token_err(index, tok, "rotation needs an angle in parentheses"))?;
        let value: f64 = inner
            .0
            .parse()
            .map_err(|_| token_err(index, tok, "angle is not a number"))?;
        if !value.is_finite() {
            return Err(token_err(index, tok, "angle must be finite"));
        }
        angle = Some(value);
        rest = inner.1;
    } else if rest.starts_with('(') {
        return Err(token_err(index, tok, "only rotations take an angle"));
    }
    let arity = kind.arity().expect("minified gates have fixed arity");
    let digits: Vec<usize> = rest
        .chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as usize)
                .ok_or_else(|| token_err(index, tok, "qubit references must be digits"))
        })
        .collect::<Result<_>>()?;
    if digits.len() != arity {
        return Err(token_err(
            index,
            tok,
            format_args!("gate '{name}' needs {arity} qubit digit(s), found {}", digits.len()),
        ));
    }
    if (1..digits.len()).any(|i| digits[..i].contains(&digits[i])) {
        return Err(token_err(index, tok, "qubit references must be distinct"));
    }
    Ok((kind, angle, digits))
}

/// Expand into a runnable circuit: equal clbit count and a trailing
/// measurement of every qubit.
fn expand(mc: &MinifiedCircuit) -> Result<QuantumCircuit> {
    let mut qc = QuantumCircuit::new(mc.num_qubits, mc.num_qubits)?;
    for (i, tok) in mc.tokens.iter().enumerate() {
        let (kind, angle, qubits) = parse_token(i + 1, tok)?;
        let mut args: Vec<f64> = Vec::with_capacity(qubits.len() + 1);
        if let Some(a) = angle {
            args.push(a);
        }
        args.extend(qubits.iter().map(|&q| q as f64));
        qc.append(build_gate_op(kind, &args)?)?;
    }
    qc.measure_all()?;
    Ok(qc)
}
