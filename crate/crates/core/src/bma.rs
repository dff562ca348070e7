//! Grover-walk Markov sequencer: a binary pitch-transition table drives
//! per-note Grover circuits. Each iteration extracts the current
//! pitch's row, marks the allowed next pitches in a diagonal ±1 oracle,
//! runs one Grover iteration, samples, and the winning basis state
//! picks the next pitch.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::circuit::QuantumCircuit;
use crate::error::{QacError, Result};
use crate::gate::CMatrix;
use crate::sampling::{binstr2dec, dec2binstr, sample_counts_with_rng, seeded_rng, Counts};

/// Pitch labels plus the binary first-order transition matrix: rows are
/// the current pitch, columns the allowed next pitches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    labels: Vec<(String, u8)>,
    matrix: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
struct LabelEntry {
    name: String,
    midi: u8,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    labels: Vec<LabelEntry>,
    matrix: Vec<Vec<u8>>,
}

impl TransitionTable {
    pub fn new(labels: Vec<(String, u8)>, matrix: Vec<Vec<u8>>) -> Result<TransitionTable> {
        let n = labels.len();
        if n < 2 {
            return Err(QacError::Argument(
                "transition table needs at least 2 pitches".into(),
            ));
        }
        for (i, (name, midi)) in labels.iter().enumerate() {
            if name.is_empty() {
                return Err(QacError::Argument("empty pitch name".into()));
            }
            if *midi > 127 {
                return Err(QacError::Argument(format!(
                    "pitch '{name}': MIDI note {midi} exceeds 127"
                )));
            }
            if labels[..i].iter().any(|(other, _)| other == name) {
                return Err(QacError::Argument(format!("duplicate pitch name '{name}'")));
            }
        }
        if matrix.len() != n {
            return Err(QacError::Argument(format!(
                "matrix has {} rows for {n} pitches",
                matrix.len()
            )));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(QacError::Argument(format!(
                    "matrix row {i} has {} entries for {n} pitches",
                    row.len()
                )));
            }
            if row.iter().any(|&v| v > 1) {
                return Err(QacError::Argument(format!(
                    "matrix row {i} has entries outside {{0,1}}"
                )));
            }
            if row.iter().all(|&v| v == 0) {
                return Err(QacError::Argument(format!(
                    "pitch '{}' has no allowed successors (dead end)",
                    labels[i].0
                )));
            }
        }
        Ok(TransitionTable { labels, matrix })
    }

    pub fn from_json(text: &str) -> Result<TransitionTable> {
        let file: TableFile = serde_json::from_str(text)
            .map_err(|e| QacError::Argument(format!("table document: {e}")))?;
        TransitionTable::new(
            file.labels.into_iter().map(|l| (l.name, l.midi)).collect(),
            file.matrix,
        )
    }

    pub fn to_json(&self) -> String {
        let file = TableFile {
            labels: self
                .labels
                .iter()
                .map(|(name, midi)| LabelEntry {
                    name: name.clone(),
                    midi: *midi,
                })
                .collect(),
            matrix: self.matrix.clone(),
        };
        serde_json::to_string_pretty(&file).expect("table serializes")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> impl Iterator<Item = (&str, u8)> {
        self.labels.iter().map(|(n, m)| (n.as_str(), *m))
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|(n, _)| n == label)
            .ok_or_else(|| QacError::UnknownName(label.to_string()))
    }

    pub fn label_at(&self, index: usize) -> Option<(&str, u8)> {
        self.labels.get(index).map(|(n, m)| (n.as_str(), *m))
    }

    pub fn row(&self, index: usize) -> &[u8] {
        &self.matrix[index]
    }

    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.matrix[from][to] == 1
    }
}

/// Marked next-state flags for one table row, conceptually padded with
/// zeros up to 2^n basis states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetStates {
    pub flags: Vec<bool>,
}

impl TargetStates {
    pub fn popcount(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn first_set(&self) -> Option<usize> {
        self.flags.iter().position(|&f| f)
    }
}

/// The table row for the current pitch, as marked-state flags.
pub fn get_target_states(table: &TransitionTable, current_label: &str) -> Result<TargetStates> {
    let idx = table.label_index(current_label)?;
    Ok(TargetStates {
        flags: table.row(idx).iter().map(|&v| v == 1).collect(),
    })
}

/// Qubits needed to address `num_states` basis states: ceil(log2).
pub fn states2qubits(num_states: usize) -> Result<usize> {
    if num_states < 2 {
        return Err(QacError::Argument(
            "at least 2 states are needed; a single-state walk has nothing to choose".into(),
        ));
    }
    Ok((usize::BITS - (num_states - 1).leading_zeros()) as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProportionCheck {
    Ok,
    Warning,
}

/// Advisory check of the marked-state proportion; at or above one half
/// a single Grover iteration cannot amplify.
pub fn check_proportion(targets: &TargetStates, n: usize) -> ProportionCheck {
    if 2 * targets.popcount() >= 1 << n {
        ProportionCheck::Warning
    } else {
        ProportionCheck::Ok
    }
}

/// Diagonal ±1 oracle: −1 on marked states, +1 elsewhere including the
/// padded tail.
pub fn build_oracle_matrix(targets: &TargetStates, n: usize) -> Result<CMatrix> {
    if targets.popcount() == 0 {
        return Err(QacError::Argument("no target states are marked".into()));
    }
    let dim = 1usize << n;
    if targets.flags.len() > dim {
        return Err(QacError::Argument(format!(
            "{} flags exceed the {dim} states of {n} qubit(s)",
            targets.flags.len()
        )));
    }
    let mut m = CMatrix::identity(dim);
    for (i, &flag) in targets.flags.iter().enumerate() {
        if flag {
            m.set(i, i, -Complex64::ONE);
        }
    }
    Ok(m)
}

/// One-iteration Grover circuit: uniform superposition, oracle, and the
/// diffusion operator, measuring every qubit. Supported for 2..=4
/// qubits (the two-to-four-controls gate inventory).
pub fn build_bma_circuit(targets: &TargetStates, n: usize) -> Result<QuantumCircuit> {
    if !(2..=4).contains(&n) {
        return Err(QacError::Unsupported(format!(
            "{n} qubits: the walk is defined for 2 to 4 qubits"
        )));
    }
    if check_proportion(targets, n) == ProportionCheck::Warning {
        return Err(QacError::Proportion {
            marked: targets.popcount(),
            total: 1 << n,
        });
    }
    let oracle = build_oracle_matrix(targets, n)?;
    let mut qc = QuantumCircuit::new(n, n)?;
    for q in 0..n {
        qc.h(q)?;
    }
    qc.unitary(oracle, (0..n).collect())?;
    // diffusion: reflect about the uniform superposition
    for q in 0..n {
        qc.h(q)?;
    }
    for q in 0..n {
        qc.x(q)?;
    }
    qc.h(n - 1)?;
    match n {
        2 => qc.cx(0, 1)?,
        3 => qc.ccx(0, 1, 2)?,
        _ => qc.cccx(0, 1, 2, 3)?,
    };
    qc.h(n - 1)?;
    for q in 0..n {
        qc.x(q)?;
    }
    for q in 0..n {
        qc.h(q)?;
    }
    qc.measure_all()?;
    Ok(qc)
}

/// Winner of a counts draw: maximal tally, ties to the smallest decimal
/// state. A winner beyond the label list is a padded-state victory and
/// asks the caller to resample.
pub fn calc_next_note<'t>(
    counts: &Counts,
    table: &'t TransitionTable,
) -> Result<(&'t str, u8, String)> {
    let (state, _tally) = counts
        .most_frequent()
        .ok_or_else(|| QacError::Argument("empty counts".into()))?;
    let index = binstr2dec(state)? as usize;
    match table.label_at(index) {
        Some((label, midi)) => Ok((label, midi, state.to_string())),
        None => Err(QacError::Resample {
            state: state.to_string(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencerConfig {
    pub start_label: String,
    pub num_loops: usize,
    pub period_ms: u64,
    pub shots: u64,
    pub seed: Option<u64>,
}

impl SequencerConfig {
    pub fn new(start_label: impl Into<String>, num_loops: usize) -> SequencerConfig {
        SequencerConfig {
            start_label: start_label.into(),
            num_loops,
            period_ms: 150,
            shots: 100,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoteEvent {
    pub t_ms: u64,
    pub midi_note: u8,
    pub label: String,
    pub winning_state: String,
    pub winning_count: u64,
}

impl NoteEvent {
    /// CLI line format: `t_ms,midi,label,state,count`.
    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.t_ms, self.midi_note, self.label, self.winning_state, self.winning_count
        )
    }
}

/// A sequencer run: the events produced, plus the error that aborted
/// the loop early, if any.
#[derive(Debug)]
pub struct SequencerRun {
    pub events: Vec<NoteEvent>,
    pub error: Option<QacError>,
}

/// How many fresh draws a padded-state winner may trigger before the
/// loop falls back to the best in-range state.
const MAX_RESAMPLES: usize = 8;

/// Run the walk: `num_loops` notes at `k * period_ms` offsets. The
/// schedule is logical; callers that perform live playback sleep
/// between events themselves. Deterministic for a fixed seed.
pub fn run_sequencer(table: &TransitionTable, config: &SequencerConfig) -> SequencerRun {
    let mut events = Vec::with_capacity(config.num_loops);
    let mut rng = seeded_rng(config.seed.unwrap_or(0));
    let mut current = match table.label_index(&config.start_label) {
        Ok(i) => i,
        Err(e) => return SequencerRun { events, error: Some(e) },
    };
    if config.period_ms == 0 || config.shots == 0 {
        return SequencerRun {
            events,
            error: Some(QacError::Argument(
                "period and shots must be positive".into(),
            )),
        };
    }
    for k in 0..config.num_loops {
        match next_event(table, current, config.shots, &mut rng) {
            Ok(mut event) => {
                event.t_ms = k as u64 * config.period_ms;
                current = table
                    .label_index(&event.label)
                    .expect("event labels come from the table");
                events.push(event);
            }
            Err(e) => {
                return SequencerRun {
                    events,
                    error: Some(e),
                }
            }
        }
    }
    SequencerRun { events, error: None }
}

/// One iteration: row → circuit → sample → winner, with the bounded
/// resample policy for padded-state winners.
fn next_event(
    table: &TransitionTable,
    current: usize,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<NoteEvent> {
    let (label, _) = table.label_at(current).expect("current index is in range");
    let targets = get_target_states(table, label)?;
    // 2-label tables lift to the 2-qubit minimum; their rows stay under
    // the half proportion automatically (1 marked of 4)
    let n = states2qubits(table.len())?.max(2);
    let qc = build_bma_circuit(&targets, n)?;
    let mut counts = sample_counts_with_rng(&qc, shots, rng)?;
    for _ in 0..MAX_RESAMPLES {
        match calc_next_note(&counts, table) {
            Ok((next_label, midi, state)) => {
                let winning_count = counts.get(&state);
                return Ok(NoteEvent {
                    t_ms: 0,
                    midi_note: midi,
                    label: next_label.to_string(),
                    winning_state: state,
                    winning_count,
                });
            }
            Err(QacError::Resample { .. }) => {
                counts = sample_counts_with_rng(&qc, shots, rng)?;
            }
            Err(e) => return Err(e),
        }
    }
    // all draws crowned a padded state: best in-range key of the last
    // draw, else the first allowed target of the row
    let in_range = counts
        .iter()
        .filter(|(k, _)| binstr2dec(k).map_or(false, |v| (v as usize) < table.len()))
        .fold(None::<(&str, u64)>, |best, (k, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((k, v)),
        });
    let (state, winning_count) = match in_range {
        Some((k, v)) => (k.to_string(), v),
        None => {
            let first = targets.first_set().expect("rows have at least one target");
            (dec2binstr(first as u64, n), 0)
        }
    };
    let index = binstr2dec(&state)? as usize;
    let (next_label, midi) = table.label_at(index).expect("in-range index");
    Ok(NoteEvent {
        t_ms: 0,
        midi_note: midi,
        label: next_label.to_string(),
        winning_state: state,
        winning_count,
    })
}
