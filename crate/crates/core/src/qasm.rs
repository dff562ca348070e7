//! OpenQASM 2.0 subset interchange: a canonical emitter, a parser for
//! the same subset, and a generator for self-contained Python scripts
//! targeting the upstream framework (the only route for circuits with
//! arbitrary-matrix gates, which OpenQASM 2.0 cannot express).

use std::f64::consts::PI;

use crate::circuit::QuantumCircuit;
use crate::error::{QacError, Result};
use crate::gate::{GateKind, GateOp};
use crate::registry::build_gate_op;

/// Canonical OpenQASM 2.0 text for a circuit. Circuits containing
/// `unitary` ops cannot be expressed; use [`emit_framework_code`].
pub fn emit_qasm(circuit: &QuantumCircuit) -> Result<String> {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    out.push_str(&format!("qreg q[{}];\n", circuit.num_qubits()));
    if circuit.num_clbits() > 0 {
        out.push_str(&format!("creg c[{}];\n", circuit.num_clbits()));
    }
    for op in circuit.ops() {
        out.push_str(&emit_statement(op)?);
        out.push('\n');
    }
    Ok(out)
}

fn emit_statement(op: &GateOp) -> Result<String> {
    let q = &op.qubits;
    Ok(match op.kind {
        GateKind::X
        | GateKind::Y
        | GateKind::Z
        | GateKind::H
        | GateKind::S
        | GateKind::T => format!("{} q[{}];", op.kind.token(), q[0]),
        GateKind::Rx | GateKind::Ry | GateKind::Rz => {
            format!("{}({}) q[{}];", op.kind.token(), op.angle.unwrap(), q[0])
        }
        GateKind::Cx | GateKind::Cz | GateKind::Swap => {
            format!("{} q[{}],q[{}];", op.kind.token(), q[0], q[1])
        }
        GateKind::Crx | GateKind::Cry | GateKind::Crz => format!(
            "{}({}) q[{}],q[{}];",
            op.kind.token(),
            op.angle.unwrap(),
            q[0],
            q[1]
        ),
        GateKind::Ccx => format!("ccx q[{}],q[{}],q[{}];", q[0], q[1], q[2]),
        GateKind::Cccx => format!("c3x q[{}],q[{}],q[{}],q[{}];", q[0], q[1], q[2], q[3]),
        GateKind::Measure => format!("measure q[{}] -> c[{}];", q[0], op.clbit.unwrap()),
        GateKind::Unitary => {
            return Err(QacError::UnsupportedExport(
                "OpenQASM 2.0 has no statement for arbitrary-matrix gates; use the framework-code export instead".into(),
            ))
        }
    })
}

struct Stmt {
    text: String,
    line: usize,
    column: usize,
}

/// Split source text into `;`-terminated statements, dropping `//`
/// comments, keeping each statement's start position.
fn split_statements(text: &str) -> Result<Vec<Stmt>> {
    let mut stmts = Vec::new();
    let mut cur = String::new();
    let (mut cur_line, mut cur_col) = (1usize, 1usize);
    let mut started = false;
    for (ln, raw) in text.lines().enumerate() {
        let code = raw.split("//").next().unwrap_or("");
        for (pos, ch) in code.chars().enumerate() {
            if ch == ';' {
                let t = cur.trim().to_string();
                if !t.is_empty() {
                    stmts.push(Stmt {
                        text: t,
                        line: cur_line,
                        column: cur_col,
                    });
                }
                cur.clear();
                started = false;
            } else {
                if !started && !ch.is_whitespace() {
                    started = true;
                    cur_line = ln + 1;
                    cur_col = pos + 1;
                }
                cur.push(ch);
            }
        }
        cur.push(' ');
    }
    if started && !cur.trim().is_empty() {
        return Err(QacError::parse(
            cur_line,
            cur_col,
            format!("statement '{}' is missing its ';'", cur.trim()),
        ));
    }
    Ok(stmts)
}

/// Evaluate an angle expression: `['-'] term (('*'|'/') term)*` where a
/// term is a number or `pi`.
fn parse_angle_expr(expr: &str) -> Option<f64> {
    let expr = expr.trim();
    let (negate, rest) = match expr.strip_prefix('-') {
        Some(r) => (true, r.trim_start()),
        None => (false, expr),
    };
    let mut value: Option<f64> = None;
    let mut pending_op = '*';
    let mut term = String::new();
    let flush = |value: &mut Option<f64>, pending_op: char, term: &mut String| -> Option<()> {
        let t = term.trim();
        if t.is_empty() {
            return None;
        }
        let v = if t == "pi" { PI } else { t.parse::<f64>().ok()? };
        *value = Some(match (*value, pending_op) {
            (None, _) => v,
            (Some(acc), '*') => acc * v,
            (Some(acc), '/') => acc / v,
            _ => return None,
        });
        term.clear();
        Some(())
    };
    for ch in rest.chars() {
        if ch == '*' || ch == '/' {
            flush(&mut value, pending_op, &mut term)?;
            pending_op = ch;
        } else {
            term.push(ch);
        }
    }
    flush(&mut value, pending_op, &mut term)?;
    let v = value?;
    let v = if negate { -v } else { v };
    v.is_finite().then_some(v)
}

/// `name[index]` operand.
fn parse_operand(stmt: &Stmt, text: &str) -> Result<(String, usize)> {
    let text = text.trim();
    let open = text.find('[');
    let ok = open.and_then(|o| {
        let close = text.rfind(']')?;
        if close != text.len() - 1 || o == 0 || close <= o + 1 {
            return None;
        }
        let idx: usize = text[o + 1..close].parse().ok()?;
        Some((text[..o].to_string(), idx))
    });
    ok.ok_or_else(|| {
        QacError::parse(
            stmt.line,
            stmt.column,
            format!("'{text}' is not a register[index] operand"),
        )
    })
}

/// Parse the supported OpenQASM 2.0 subset into a circuit. The subset:
/// version header, `include "qelib1.inc"`, one qreg, at most one creg,
/// this engine's gate set (`c3x` spelling for the triple-controlled
/// NOT), indexed `measure`, `//` comments.
pub fn parse_qasm(text: &str) -> Result<QuantumCircuit> {
    let stmts = split_statements(text)?;
    let mut iter = stmts.iter();
    let Some(header) = iter.next() else {
        return Err(QacError::parse(1, 1, "empty document"));
    };
    if header.text.split_whitespace().collect::<Vec<_>>() != ["OPENQASM", "2.0"] {
        return Err(QacError::parse(
            header.line,
            header.column,
            format!("expected 'OPENQASM 2.0;', found '{}'", header.text),
        ));
    }
    let mut qreg: Option<(String, usize)> = None;
    let mut creg: Option<(String, usize)> = None;
    let mut parsed_ops: Vec<(GateKind, Option<f64>, Vec<usize>, Option<usize>, &Stmt)> = Vec::new();
    for stmt in iter {
        let mut words = stmt.text.split_whitespace();
        let head = words.next().unwrap_or("");
        match head {
            "include" => {
                let target = stmt.text[head.len()..].trim();
                if target != "\"qelib1.inc\"" {
                    return Err(QacError::parse(
                        stmt.line,
                        stmt.column,
                        format!("unsupported include {target}"),
                    ));
                }
            }
            "qreg" | "creg" => {
                let (name, size) = parse_operand(stmt, stmt.text[head.len()..].trim())?;
                let slot = if head == "qreg" { &mut qreg } else { &mut creg };
                if slot.is_some() {
                    return Err(QacError::parse(
                        stmt.line,
                        stmt.column,
                        format!("only one {head} is supported"),
                    ));
                }
                *slot = Some((name, size));
            }
            "measure" => {
                let rest = stmt.text[head.len()..].trim();
                let Some((lhs, rhs)) = rest.split_once("->") else {
                    return Err(QacError::parse(
                        stmt.line,
                        stmt.column,
                        "measure needs the form 'measure q[i] -> c[j]'",
                    ));
                };
                let (qname, qi) = parse_operand(stmt, lhs)?;
                let (cname, ci) = parse_operand(stmt, rhs)?;
                check_register(stmt, &qreg, &qname, qi, "qreg")?;
                check_register(stmt, &creg, &cname, ci, "creg")?;
                parsed_ops.push((GateKind::Measure, None, vec![qi], Some(ci), stmt));
            }
            "" => {}
            _ => {
                // gate application: name, optional (angle), operand list
                let text = &stmt.text;
                let name_end = text
                    .find(|c: char| c == '(' || c.is_whitespace())
                    .unwrap_or(text.len());
                let name = &text[..name_end];
                let kind = match name {
                    "c3x" => GateKind::Cccx,
                    other => GateKind::from_token(other).filter(|k| {
                        !matches!(k, GateKind::Unitary | GateKind::Measure | GateKind::Cccx)
                    }).ok_or_else(|| {
                        QacError::parse(
                            stmt.line,
                            stmt.column,
                            format!("unknown gate '{other}'"),
                        )
                    })?,
                };
                let mut rest = &text[name_end..];
                let mut angle = None;
                let rest_trim = rest.trim_start();
                if let Some(after) = rest_trim.strip_prefix('(') {
                    let Some(close) = after.find(')') else {
                        return Err(QacError::parse(
                            stmt.line,
                            stmt.column,
                            "unterminated angle parenthesis",
                        ));
                    };
                    let expr = &after[..close];
                    angle = Some(parse_angle_expr(expr).ok_or_else(|| {
                        QacError::parse(
                            stmt.line,
                            stmt.column,
                            format!("cannot evaluate angle '{expr}'"),
                        )
                    })?);
                    rest = &after[close + 1..];
                }
                if kind.takes_angle() != angle.is_some() {
                    return Err(QacError::parse(
                        stmt.line,
                        stmt.column,
                        format!(
                            "gate '{name}' {} an angle parameter",
                            if kind.takes_angle() { "requires" } else { "does not take" }
                        ),
                    ));
                }
                let mut qubits = Vec::new();
                for part in rest.trim().split(',') {
                    let (rname, idx) = parse_operand(stmt, part)?;
                    check_register(stmt, &qreg, &rname, idx, "qreg")?;
                    qubits.push(idx);
                }
                parsed_ops.push((kind, angle, qubits, None, stmt));
            }
        }
    }
    let Some((_, nq)) = &qreg else {
        return Err(QacError::parse(1, 1, "no qreg declared"));
    };
    let nc = creg.as_ref().map_or(0, |(_, n)| *n);
    let mut circuit = QuantumCircuit::new(*nq, nc)?;
    for (kind, angle, qubits, clbit, stmt) in parsed_ops {
        let op = if kind == GateKind::Measure {
            GateOp::measure(qubits[0], clbit.unwrap())
        } else {
            let mut args: Vec<f64> = Vec::with_capacity(qubits.len() + 1);
            if let Some(a) = angle {
                args.push(a);
            }
            args.extend(qubits.iter().map(|&q| q as f64));
            build_gate_op(kind, &args)
        }
        .map_err(|e| at_stmt(e, stmt))?;
        circuit.append(op).map_err(|e| at_stmt(e, stmt))?;
    }
    Ok(circuit)
}

/// Check an operand's register name and index against a declaration.
fn check_register(
    stmt: &Stmt,
    declared: &Option<(String, usize)>,
    name: &str,
    idx: usize,
    what: &str,
) -> Result<()> {
    let Some((dname, size)) = declared else {
        return Err(QacError::parse(
            stmt.line,
            stmt.column,
            format!("'{name}' used before any {what} declaration"),
        ));
    };
    if name != dname {
        return Err(QacError::parse(
            stmt.line,
            stmt.column,
            format!("unknown register '{name}' (declared {what} is '{dname}')"),
        ));
    }
    if idx >= *size {
        return Err(QacError::Range(format!(
            "line {}: index {idx} exceeds {what} {dname}[{size}]",
            stmt.line
        )));
    }
    Ok(())
}

/// Stamp a validation error with the statement's line.
fn at_stmt(err: QacError, stmt: &Stmt) -> QacError {
    match err {
        QacError::Range(msg) => QacError::Range(format!("line {}: {msg}", stmt.line)),
        QacError::Argument(msg) => QacError::Argument(format!("line {}: {msg}", stmt.line)),
        other => other.at_line(stmt.line),
    }
}

/// Self-contained Python script that rebuilds the circuit in the
/// upstream framework (including arbitrary-matrix gates) and prints a
/// counts simulation at the given shot count.
pub fn emit_framework_code(circuit: &QuantumCircuit, shots: u64) -> String {
    let mut out = String::from(
        "from qiskit import QuantumCircuit\nfrom qiskit.providers.basic_provider import BasicSimulator\n\n",
    );
    if circuit.num_clbits() > 0 {
        out.push_str(&format!(
            "qc = QuantumCircuit({}, {})\n",
            circuit.num_qubits(),
            circuit.num_clbits()
        ));
    } else {
        out.push_str(&format!("qc = QuantumCircuit({})\n", circuit.num_qubits()));
    }
    for op in circuit.ops() {
        out.push_str(&framework_call(op));
        out.push('\n');
    }
    out.push_str(&format!(
        "\nbackend = BasicSimulator()\nresult = backend.run(qc, shots={shots}).result()\nprint(result.get_counts())\n"
    ));
    out
}

fn framework_call(op: &GateOp) -> String {
    let q = &op.qubits;
    match op.kind {
        GateKind::X
        | GateKind::Y
        | GateKind::Z
        | GateKind::H
        | GateKind::S
        | GateKind::T => format!("qc.{}({})", op.kind.token(), q[0]),
        GateKind::Rx | GateKind::Ry | GateKind::Rz => {
            format!("qc.{}({:?}, {})", op.kind.token(), op.angle.unwrap(), q[0])
        }
        GateKind::Cx | GateKind::Cz | GateKind::Swap => {
            format!("qc.{}({}, {})", op.kind.token(), q[0], q[1])
        }
        GateKind::Crx | GateKind::Cry | GateKind::Crz => format!(
            "qc.{}({:?}, {}, {})",
            op.kind.token(),
            op.angle.unwrap(),
            q[0],
            q[1]
        ),
        GateKind::Ccx => format!("qc.ccx({}, {}, {})", q[0], q[1], q[2]),
        GateKind::Cccx => format!("qc.mcx([{}, {}, {}], {})", q[0], q[1], q[2], q[3]),
        GateKind::Measure => format!("qc.measure({}, {})", q[0], op.clbit.unwrap()),
        GateKind::Unitary => {
            let m = op.matrix.as_ref().unwrap();
            let mut rows = Vec::with_capacity(m.dim());
            for r in 0..m.dim() {
                let cells: Vec<String> = (0..m.dim())
                    .map(|c| {
                        let v = m.get(r, c);
                        format!("complex({:?}, {:?})", v.re, v.im)
                    })
                    .collect();
                rows.push(format!("[{}]", cells.join(", ")));
            }
            let targets: Vec<String> = q.iter().map(usize::to_string).collect();
            format!("qc.unitary([{}], [{}])", rows.join(", "), targets.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::run_statevector;

    #[test]
    fn canonical_bell_text() {
        let mut qc = QuantumCircuit::new(1, 1).unwrap();
        qc.h(0).unwrap().m(0, 0).unwrap();
        assert_eq!(
            emit_qasm(&qc).unwrap(),
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\ncreg c[1];\nh q[0];\nmeasure q[0] -> c[0];\n"
        );
    }

    #[test]
    fn creg_omitted_when_absent() {
        let qc = QuantumCircuit::new(2, 0).unwrap();
        assert_eq!(
            emit_qasm(&qc).unwrap(),
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\n"
        );
    }

    #[test]
    fn unitary_not_exportable() {
        let mut qc = QuantumCircuit::new(1, 0).unwrap();
        let x = crate::gate::CMatrix::from_flat_values(&[0.0, 1.0, 1.0, 0.0]).unwrap();
        qc.unitary(x, vec![0]).unwrap();
        assert!(matches!(
            emit_qasm(&qc),
            Err(QacError::UnsupportedExport(_))
        ));
    }

    #[test]
    fn round_trip_all_gates() {
        let mut qc = QuantumCircuit::new(5, 5).unwrap();
        qc.x(0)
            .unwrap()
            .y(1)
            .unwrap()
            .z(2)
            .unwrap()
            .h(3)
            .unwrap()
            .s(4)
            .unwrap()
            .t(0)
            .unwrap()
            .rx(0.25, 1)
            .unwrap()
            .ry(-1.75, 2)
            .unwrap()
            .rz(3.5, 3)
            .unwrap()
            .cx(0, 1)
            .unwrap()
            .cz(1, 2)
            .unwrap()
            .crx(0.5, 2, 3)
            .unwrap()
            .cry(0.6, 3, 4)
            .unwrap()
            .crz(0.7, 4, 0)
            .unwrap()
            .ccx(0, 1, 2)
            .unwrap()
            .cccx(0, 1, 2, 3)
            .unwrap()
            .swap(2, 4)
            .unwrap()
            .m(0, 0)
            .unwrap()
            .m(3, 3)
            .unwrap();
        let text = emit_qasm(&qc).unwrap();
        let back = parse_qasm(&text).unwrap();
        assert_eq!(back.ops(), qc.ops());
        assert_eq!(back.num_qubits(), 5);
        assert_eq!(back.num_clbits(), 5);
        // emission is canonical
        assert_eq!(emit_qasm(&back).unwrap(), text);
    }

    #[test]
    fn parses_reference_snippet() {
        let text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\ncreg c[1];\nh q[0];\nmeasure q[0] -> c[0];\n";
        let qc = parse_qasm(text).unwrap();
        assert_eq!(qc.len(), 2);
        assert_eq!(qc.ops()[0].kind, GateKind::H);
        assert!(qc.ops()[1].is_measurement());
    }

    #[test]
    fn pi_expressions() {
        let text = "OPENQASM 2.0;\nqreg q[1];\nrx(pi/2) q[0];\nry(-pi/4) q[0];\nrz(2*pi) q[0];\n";
        let qc = parse_qasm(text).unwrap();
        assert!((qc.ops()[0].angle.unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((qc.ops()[1].angle.unwrap() + PI / 4.0).abs() < 1e-15);
        assert!((qc.ops()[2].angle.unwrap() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn unknown_gate_named() {
        let text = "OPENQASM 2.0;\nqreg q[2];\nu3(0.1,0.2,0.3) q[0];\n";
        match parse_qasm(text) {
            Err(QacError::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("u3"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn register_overflow_has_line() {
        let text = "OPENQASM 2.0;\nqreg q[2];\nh q[3];\n";
        match parse_qasm(text) {
            Err(QacError::Range(msg)) => assert!(msg.contains("line 3"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors() {
        assert!(parse_qasm("").is_err());
        assert!(parse_qasm("OPENQASM 3.0;\nqreg q[1];").is_err());
        assert!(parse_qasm("OPENQASM 2.0;\nqreg q[1]").is_err(), "missing semicolon");
        assert!(parse_qasm("OPENQASM 2.0;\nh q[0];").is_err(), "no qreg");
        assert!(parse_qasm("OPENQASM 2.0;\nqreg q[1];\nmeasure q[0] -> c[0];").is_err());
        assert!(parse_qasm("OPENQASM 2.0;\ninclude \"other.inc\";\nqreg q[1];").is_err());
        assert!(parse_qasm("OPENQASM 2.0;\nqreg q[1];\nrx q[0];").is_err(), "rx without angle");
        assert!(parse_qasm("OPENQASM 2.0;\nqreg q[1];\nh(0.5) q[0];").is_err(), "h with angle");
    }

    #[test]
    fn comments_ignored() {
        let text = "// leading comment\nOPENQASM 2.0; // trailing\nqreg q[1]; creg c[1];\nh q[0]; measure q[0] -> c[0]; // done\n";
        let qc = parse_qasm(text).unwrap();
        assert_eq!(qc.len(), 2);
    }

    #[test]
    fn simulation_agreement_through_round_trip() {
        let mut qc = QuantumCircuit::new(3, 0).unwrap();
        qc.h(0)
            .unwrap()
            .crx(1.234, 0, 1)
            .unwrap()
            .ccx(0, 1, 2)
            .unwrap()
            .rz(0.777, 2)
            .unwrap();
        let back = parse_qasm(&emit_qasm(&qc).unwrap()).unwrap();
        let (a, b) = (
            run_statevector(&qc).unwrap(),
            run_statevector(&back).unwrap(),
        );
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn framework_script_shape() {
        let mut qc = QuantumCircuit::new(2, 2).unwrap();
        let x = crate::gate::CMatrix::from_flat_values(&[0.0, 1.0, 1.0, 0.0]).unwrap();
        qc.h(0)
            .unwrap()
            .unitary(x, vec![1])
            .unwrap()
            .measure_all()
            .unwrap();
        let script = emit_framework_code(&qc, 127);
        assert!(script.contains("QuantumCircuit(2, 2)"));
        assert!(script.contains("qc.h(0)"));
        assert!(script.contains("qc.unitary([[complex(0.0, 0.0), complex(1.0, 0.0)], [complex(1.0, 0.0), complex(0.0, 0.0)]], [1])"));
        assert!(script.contains("qc.measure(0, 0)"));
        assert!(script.contains("shots=127"));
        let empty = emit_framework_code(&QuantumCircuit::new(1, 0).unwrap(), 5);
        assert!(empty.contains("QuantumCircuit(1)"));
        assert!(!empty.contains("qc.h"));
    }
}
