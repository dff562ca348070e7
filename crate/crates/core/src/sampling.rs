//! Shot sampling. The final statevector is projected through the
//! circuit's measurement map into classical keys, then shots are drawn
//! from the key distribution with a seeded generator. Counts and
//! per-shot memory share one draw path, so equal seeds give a memory
//! whose tally is exactly the counts.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use crate::circuit::QuantumCircuit;
use crate::error::{QacError, Result};
use crate::statevector::run_statevector;

/// Deterministic generator used everywhere shots are drawn: ChaCha with
/// 8 rounds, seeded from a single u64.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parse a classical key ("0110") to its decimal value.
pub fn binstr2dec(key: &str) -> Result<u64> {
    u64::from_str_radix(key, 2)
        .map_err(|_| QacError::Argument(format!("'{key}' is not a binary string")))
}

/// Format a decimal value as a classical key of the given width.
pub fn dec2binstr(value: u64, width: usize) -> String {
    format!("{value:0width$b}")
}

/// Aggregated shot tallies, keyed by classical bit string. Only keys
/// that were actually drawn appear. Iteration order is lexicographic,
/// which for fixed-width binary keys is numeric order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Counts {
    map: BTreeMap<String, u64>,
}

impl Counts {
    pub fn from_keys<I: IntoIterator<Item = String>>(keys: I) -> Counts {
        let mut map = BTreeMap::new();
        for k in keys {
            *map.entry(k).or_insert(0) += 1;
        }
        Counts { map }
    }

    pub fn get(&self, key: &str) -> u64 {
        self.map.get(key).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.map.values().sum()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.map.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn map(&self) -> &BTreeMap<String, u64> {
        &self.map
    }

    /// Highest-tally key; ties go to the smallest decimal value, which
    /// is the first maximum in iteration order.
    pub fn most_frequent(&self) -> Option<(&str, u64)> {
        let mut best: Option<(&str, u64)> = None;
        for (k, v) in self.iter() {
            if best.map_or(true, |(_, bv)| v > bv) {
                best = Some((k, v));
            }
        }
        best
    }

    /// Alternating "key tally" pairs in key order, space separated.
    pub fn pairs(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.iter() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(k);
            out.push(' ');
            out.push_str(&v.to_string());
        }
        out
    }

    /// Inverse of [`Counts::pairs`].
    pub fn from_pairs(text: &str) -> Result<Counts> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() % 2 != 0 {
            return Err(QacError::Argument(format!(
                "counts pairs need an even number of tokens, got {}",
                tokens.len()
            )));
        }
        let mut map = BTreeMap::new();
        for pair in tokens.chunks_exact(2) {
            if pair[0].chars().any(|c| c != '0' && c != '1') {
                return Err(QacError::Argument(format!(
                    "'{}' is not a binary key",
                    pair[0]
                )));
            }
            let tally: u64 = pair[1]
                .parse()
                .map_err(|_| QacError::Argument(format!("'{}' is not a tally", pair[1])))?;
            *map.entry(pair[0].to_string()).or_insert(0) += tally;
        }
        Ok(Counts { map })
    }
}

/// Per-shot classical keys in draw order.
pub type ShotMemory = Vec<String>;

/// Classical key distribution of a circuit: each key's probability mass
/// plus cumulative sums for inverse-transform draws.
#[derive(Debug, Clone)]
pub struct KeyDistribution {
    keys: Vec<String>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    total: f64,
}

impl KeyDistribution {
    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn probability(&self, key: &str) -> f64 {
        self.keys
            .iter()
            .position(|k| k == key)
            .map_or(0.0, |i| self.weights[i] / self.total)
    }

    fn draw_index<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * self.total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.keys.len() - 1)
    }
}

/// Project the circuit's final state through its measurement map and
/// aggregate basis probabilities by classical key. Classical bit `c`
/// takes the value of basis bit `q` for each measurement `m q c` (a
/// later measurement into the same bit wins); unmeasured classical bits
/// read 0. Key strings put the highest-index classical bit first.
pub fn classical_distribution(circuit: &QuantumCircuit) -> Result<KeyDistribution> {
    if !circuit.has_measurement() {
        return Err(QacError::NoMeasure(
            "circuit has no measurement gates".into(),
        ));
    }
    let sv = run_statevector(circuit)?;
    let meas: Vec<(usize, usize)> = circuit
        .ops()
        .iter()
        .filter(|op| op.is_measurement())
        .map(|op| (op.qubits[0], op.clbit.unwrap()))
        .collect();
    let width = circuit.num_clbits();
    let mut mass: BTreeMap<u64, f64> = BTreeMap::new();
    for (basis, p) in sv.probabilities().into_iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut key: u64 = 0;
        for &(q, c) in &meas {
            let bit = (basis >> q) as u64 & 1;
            key = (key & !(1 << c)) | (bit << c);
        }
        *mass.entry(key).or_insert(0.0) += p;
    }
    let mut keys = Vec::with_capacity(mass.len());
    let mut weights = Vec::with_capacity(mass.len());
    let mut cumulative = Vec::with_capacity(mass.len());
    let mut acc = 0.0;
    for (key, w) in mass {
        keys.push(dec2binstr(key, width));
        weights.push(w);
        acc += w;
        cumulative.push(acc);
    }
    Ok(KeyDistribution {
        keys,
        weights,
        cumulative,
        total: acc,
    })
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(QacError::Argument("shot count must be at least 1".into()));
    }
    Ok(())
}

/// Draw `shots` keys and tally them.
pub fn sample_counts_with_rng<R: Rng>(
    circuit: &QuantumCircuit,
    shots: u64,
    rng: &mut R,
) -> Result<Counts> {
    check_shots(shots)?;
    let dist = classical_distribution(circuit)?;
    let mut tally = vec![0u64; dist.keys.len()];
    for _ in 0..shots {
        tally[dist.draw_index(rng)] += 1;
    }
    let mut map = BTreeMap::new();
    for (i, t) in tally.into_iter().enumerate() {
        if t > 0 {
            map.insert(dist.keys[i].clone(), t);
        }
    }
    Ok(Counts { map })
}

/// Draw `shots` keys and keep them in order.
pub fn sample_memory_with_rng<R: Rng>(
    circuit: &QuantumCircuit,
    shots: u64,
    rng: &mut R,
) -> Result<ShotMemory> {
    check_shots(shots)?;
    let dist = classical_distribution(circuit)?;
    let mut out = Vec::with_capacity(shots as usize);
    for _ in 0..shots {
        out.push(dist.keys[dist.draw_index(rng)].clone());
    }
    Ok(out)
}

pub fn sample_counts(circuit: &QuantumCircuit, shots: u64, seed: u64) -> Result<Counts> {
    sample_counts_with_rng(circuit, shots, &mut seeded_rng(seed))
}

pub fn sample_memory(circuit: &QuantumCircuit, shots: u64, seed: u64) -> Result<ShotMemory> {
    sample_memory_with_rng(circuit, shots, &mut seeded_rng(seed))
}
