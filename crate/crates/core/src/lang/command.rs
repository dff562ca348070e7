//! Session command language: one message per line, comma-separated
//! groups split into consecutive messages first. Verbs:
//!
//! ```text
//! QuantumCircuit <name> <nq> [<nc>] ...        (repeating)
//! <circuit> <gate> <args...>
//! <dst> add <src>
//! Simulator <name> <circuit> <shots> [<sim_update 0|1>]
//! <sim> get_counts|get_memory|get_statevector|get_qasm|get_qiskit [textbox]
//! set console_output 0|1
//! ```

use crate::error::{QacError, Result};
use crate::gate::GateKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetrieveKind {
    Counts,
    Memory,
    Statevector,
    Qasm,
    Qiskit,
}

impl RetrieveKind {
    pub fn token(self) -> &'static str {
        match self {
            RetrieveKind::Counts => "get_counts",
            RetrieveKind::Memory => "get_memory",
            RetrieveKind::Statevector => "get_statevector",
            RetrieveKind::Qasm => "get_qasm",
            RetrieveKind::Qiskit => "get_qiskit",
        }
    }

    fn from_token(token: &str) -> Option<RetrieveKind> {
        Some(match token {
            "get_counts" => RetrieveKind::Counts,
            "get_memory" => RetrieveKind::Memory,
            "get_statevector" => RetrieveKind::Statevector,
            "get_qasm" => RetrieveKind::Qasm,
            "get_qiskit" => RetrieveKind::Qiskit,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    CreateCircuits(Vec<(String, usize, Option<usize>)>),
    AppendGate {
        circuit: String,
        gate: String,
        args: Vec<f64>,
    },
    Compose {
        dst: String,
        src: String,
    },
    CreateSimulator {
        name: String,
        circuit: String,
        shots: u64,
        sim_update: bool,
    },
    Retrieve {
        simulator: String,
        what: RetrieveKind,
        textbox: bool,
    },
    SetConsoleOutput(bool),
}

/// Split a message text on commas into individual messages; segments
/// are trimmed and empty ones dropped.
pub fn split_message_groups(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

/// Cut a script line at its `#` comment marker.
pub fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

struct Tok<'a> {
    text: &'a str,
    /// 1-based character column of the token's first character.
    column: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut column = 0usize;
    let mut start = None;
    for (i, ch) in line.char_indices() {
        column += 1;
        if ch.is_whitespace() {
            if let Some((s, c)) = start.take() {
                out.push(Tok {
                    text: &line[s..i],
                    column: c,
                });
            }
        } else if start.is_none() {
            start = Some((i, column));
        }
    }
    if let Some((s, c)) = start {
        out.push(Tok {
            text: &line[s..],
            column: c,
        });
    }
    out
}

fn perr(tok: &Tok<'_>, message: impl std::fmt::Display) -> QacError {
    QacError::parse(1, tok.column, format!("'{}': {message}", tok.text))
}

fn parse_count(tok: &Tok<'_>, what: &str) -> Result<usize> {
    tok.text
        .parse::<usize>()
        .map_err(|_| perr(tok, format_args!("expected {what}")))
}

fn is_uint(text: &str) -> bool {
    !text.is_empty() && text.chars().all(|c| c.is_ascii_digit())
}

fn parse_bool_flag(tok: &Tok<'_>, what: &str) -> Result<bool> {
    match tok.text {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(perr(tok, format_args!("expected {what} 0 or 1"))),
    }
}

/// Parse a single message (one group after comma splitting). Column
/// numbers in errors refer to this message's text; callers that know a
/// script line number should restamp it with [`QacError::at_line`].
pub fn parse_command(line: &str) -> Result<Command> {
    let toks = tokenize(line);
    let Some(first) = toks.first() else {
        return Err(QacError::parse(1, 1, "empty message"));
    };
    match first.text {
        "QuantumCircuit" => {
            let mut specs = Vec::new();
            let mut i = 1;
            while i < toks.len() {
                let name = &toks[i];
                if is_uint(name.text) {
                    return Err(perr(name, "expected a circuit name, found a number"));
                }
                let nq_tok = toks.get(i + 1).ok_or_else(|| {
                    perr(name, "circuit name needs a qubit count after it")
                })?;
                let nq = parse_count(nq_tok, "a qubit count")?;
                let mut nc = None;
                i += 2;
                if let Some(t) = toks.get(i) {
                    if is_uint(t.text) {
                        nc = Some(parse_count(t, "a classical bit count")?);
                        i += 1;
                    }
                }
                specs.push((name.text.to_string(), nq, nc));
            }
            if specs.is_empty() {
                return Err(perr(first, "QuantumCircuit needs at least one name and size"));
            }
            Ok(Command::CreateCircuits(specs))
        }
        "Simulator" => {
            if toks.len() < 4 || toks.len() > 5 {
                return Err(perr(
                    first,
                    "usage: Simulator <name> <circuit> <shots> [<sim_update 0|1>]",
                ));
            }
            let shots = toks[3]
                .text
                .parse::<u64>()
                .map_err(|_| perr(&toks[3], "expected a shot count"))?;
            let sim_update = match toks.get(4) {
                Some(t) => parse_bool_flag(t, "sim_update")?,
                None => false,
            };
            Ok(Command::CreateSimulator {
                name: toks[1].text.to_string(),
                circuit: toks[2].text.to_string(),
                shots,
                sim_update,
            })
        }
        "set" => {
            if toks.len() != 3 || toks[1].text != "console_output" {
                return Err(perr(first, "usage: set console_output 0|1"));
            }
            Ok(Command::SetConsoleOutput(parse_bool_flag(
                &toks[2],
                "console_output",
            )?))
        }
        _ => {
            let Some(second) = toks.get(1) else {
                return Err(perr(first, "unknown message"));
            };
            if second.text == "add" {
                if toks.len() != 3 {
                    return Err(perr(first, "usage: <dst> add <src>"));
                }
                return Ok(Command::Compose {
                    dst: first.text.to_string(),
                    src: toks[2].text.to_string(),
                });
            }
            if let Some(what) = RetrieveKind::from_token(second.text) {
                let textbox = match toks.get(2) {
                    None => false,
                    Some(t) if t.text == "textbox" && toks.len() == 3 => true,
                    Some(t) => return Err(perr(t, "only 'textbox' may follow a retrieval")),
                };
                return Ok(Command::Retrieve {
                    simulator: first.text.to_string(),
                    what,
                    textbox,
                });
            }
            let Some(_) = GateKind::from_token(second.text) else {
                return Err(perr(second, "unknown gate or verb"));
            };
            let mut args = Vec::with_capacity(toks.len() - 2);
            for t in &toks[2..] {
                let v: f64 = t
                    .text
                    .parse()
                    .map_err(|_| perr(t, "expected a numeric argument"))?;
                args.push(v);
            }
            Ok(Command::AppendGate {
                circuit: first.text.to_string(),
                gate: second.text.to_string(),
                args,
            })
        }
    }
}

/// Canonical single-space rendering; `parse(render(c)) == c`.
pub fn render_command(cmd: &Command) -> String {
    match cmd {
        Command::CreateCircuits(specs) => {
            let mut out = String::from("QuantumCircuit");
            for (name, nq, nc) in specs {
                out.push(' ');
                out.push_str(name);
                out.push_str(&format!(" {nq}"));
                if let Some(nc) = nc {
                    out.push_str(&format!(" {nc}"));
                }
            }
            out
        }
        Command::AppendGate { circuit, gate, args } => {
            let mut out = format!("{circuit} {gate}");
            for a in args {
                out.push_str(&format!(" {a}"));
            }
            out
        }
        Command::Compose { dst, src } => format!("{dst} add {src}"),
        Command::CreateSimulator {
            name,
            circuit,
            shots,
            sim_update,
        } => {
            if *sim_update {
                format!("Simulator {name} {circuit} {shots} 1")
            } else {
                format!("Simulator {name} {circuit} {shots}")
            }
        }
        Command::Retrieve {
            simulator,
            what,
            textbox,
        } => {
            if *textbox {
                format!("{simulator} {} textbox", what.token())
            } else {
                format!("{simulator} {}", what.token())
            }
        }
        Command::SetConsoleOutput(on) => format!("set console_output {}", u8::from(*on)),
    }
}
