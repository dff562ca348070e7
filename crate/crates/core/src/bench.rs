//! Shots-scaling benchmark: times the full construct→simulate→sample
//! path at several shot counts and reports median/min/max per level.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use crate::circuit::QuantumCircuit;
use crate::error::{QacError, Result};
use crate::qasm::parse_qasm;
use crate::sampling::sample_counts;

pub const CSV_HEADER: &str = "shots,median_ms,min_ms,max_ms";

/// What gets rebuilt (and therefore timed) on every repetition.
#[derive(Debug, Clone)]
pub enum BenchSource {
    /// One qubit into superposition, measured: the smallest circuit
    /// whose sampling cost is purely shots-bound.
    BuiltinH,
    /// A QASM program, re-parsed each repetition.
    Qasm(String),
}

impl BenchSource {
    pub fn build(&self) -> Result<QuantumCircuit> {
        match self {
            BenchSource::BuiltinH => {
                let mut qc = QuantumCircuit::new(1, 1)?;
                qc.h(0)?.m(0, 0)?;
                Ok(qc)
            }
            BenchSource::Qasm(text) => parse_qasm(text),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub source: BenchSource,
    pub shots_list: Vec<u64>,
    /// Timed repetitions per shot level (after one untimed warmup).
    pub repetitions: usize,
    pub csv_path: Option<PathBuf>,
    pub seed: u64,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            source: BenchSource::BuiltinH,
            shots_list: vec![2_000, 20_000, 1_000_000],
            repetitions: 5,
            csv_path: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub shots: u64,
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub times_ms: Vec<f64>,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{:.3},{:.3},{:.3}",
            self.shots, self.median_ms, self.min_ms, self.max_ms
        )
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn time_once(source: &BenchSource, shots: u64, seed: u64) -> Result<f64> {
    let start = Instant::now();
    let circuit = source.build()?;
    let counts = sample_counts(&circuit, shots, seed)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    // keep the result observably alive so the sampling loop cannot be elided
    debug_assert_eq!(counts.total(), shots);
    std::hint::black_box(&counts);
    Ok(elapsed)
}

pub fn run_bench(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    if spec.shots_list.is_empty() {
        return Err(QacError::Argument("no shot counts to benchmark".into()));
    }
    if spec.repetitions < 3 {
        return Err(QacError::Argument(format!(
            "need at least 3 repetitions, got {}",
            spec.repetitions
        )));
    }
    let mut rows = Vec::new();
    for (level, &shots) in spec.shots_list.iter().enumerate() {
        time_once(&spec.source, shots, spec.seed)?; // warmup
        let mut times: Vec<f64> = Vec::with_capacity(spec.repetitions);
        for rep in 0..spec.repetitions {
            let seed = spec
                .seed
                .wrapping_add((level as u64) << 32)
                .wrapping_add(rep as u64 + 1);
            times.push(time_once(&spec.source, shots, seed)?);
        }
        let mut sorted = times.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rows.push(BenchRow {
            shots,
            median_ms: median(&sorted),
            min_ms: sorted[0],
            max_ms: *sorted.last().unwrap(),
            times_ms: times,
        });
    }
    if let Some(path) = &spec.csv_path {
        fs::write(path, render_csv(&rows))?;
    }
    Ok(rows)
}

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}
