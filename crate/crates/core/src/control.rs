//! Performance-mapping primitives: a knob whose value is drawn from an
//! equal superposition measurement (quantized to 2^n steps, with linear
//! interpolation between triggers), a probabilistic event gate, and an
//! affine range mapper.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::QuantumCircuit;
use crate::error::{QacError, Result};
use crate::sampling::{binstr2dec, sample_counts_with_rng, seeded_rng};

/// Control value source: on each trigger, an n-qubit equal superposition
/// is measured `shots` times and the winning ket sets a new target in
/// [0,1) on the 2^n-step grid. Between triggers the current value ramps
/// linearly toward the target over `ramp_ms` (0 = jump).
#[derive(Debug)]
pub struct SuperpositionDevice {
    num_qubits: usize,
    shots: u64,
    ramp_ms: u64,
    rng: ChaCha8Rng,
    current_value: f64,
    target_value: f64,
    ramp_from: f64,
}

impl SuperpositionDevice {
    pub fn new(num_qubits: usize, shots: u64, ramp_ms: u64, seed: u64) -> Result<SuperpositionDevice> {
        if num_qubits == 0 || num_qubits > 20 {
            return Err(QacError::Range(format!(
                "superposition device supports 1 to 20 qubits, got {num_qubits}"
            )));
        }
        if shots == 0 {
            return Err(QacError::Argument("shot count must be at least 1".into()));
        }
        Ok(SuperpositionDevice {
            num_qubits,
            shots,
            ramp_ms,
            rng: seeded_rng(seed),
            current_value: 0.0,
            target_value: 0.0,
            ramp_from: 0.0,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn set_ramp_ms(&mut self, ramp_ms: u64) {
        self.ramp_ms = ramp_ms;
    }

    pub fn current_value(&self) -> f64 {
        self.current_value
    }

    pub fn target_value(&self) -> f64 {
        self.target_value
    }

    /// Measure the superposition and aim at the winning ket's value.
    /// The ramp restarts from the instantaneous current value, so the
    /// output stays continuous across mid-ramp retriggers.
    pub fn trigger(&mut self) -> Result<(String, f64)> {
        let mut qc = QuantumCircuit::new(self.num_qubits, self.num_qubits)?;
        for q in 0..self.num_qubits {
            qc.h(q)?;
        }
        qc.measure_all()?;
        let counts = sample_counts_with_rng(&qc, self.shots, &mut self.rng)?;
        let (ket, _) = counts
            .most_frequent()
            .expect("counts of at least one shot are nonempty");
        let ket = ket.to_string();
        let value = binstr2dec(&ket)? as f64 / (1u64 << self.num_qubits) as f64;
        self.ramp_from = self.current_value;
        self.target_value = value;
        if self.ramp_ms == 0 {
            self.current_value = value;
        }
        Ok((ket, value))
    }

    /// Current value at `elapsed_ms` after the last trigger: linear from
    /// the trigger-time value to the target, clamped at completion.
    pub fn step_interpolation(&mut self, elapsed_ms: u64) -> f64 {
        self.current_value = if self.ramp_ms == 0 || elapsed_ms >= self.ramp_ms {
            self.target_value
        } else {
            let t = elapsed_ms as f64 / self.ramp_ms as f64;
            self.ramp_from + (self.target_value - self.ramp_from) * t
        };
        self.current_value
    }
}

/// Pass/block gate: events pass with probability `p` (clamped to [0,1]).
#[derive(Debug)]
pub struct ProbabilityGate {
    p: f64,
    rng: ChaCha8Rng,
}

impl ProbabilityGate {
    pub fn new(p: f64, seed: u64) -> ProbabilityGate {
        ProbabilityGate {
            p: p.clamp(0.0, 1.0),
            rng: seeded_rng(seed),
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn set_p(&mut self, p: f64) {
        self.p = p.clamp(0.0, 1.0);
    }

    /// True when the event passes.
    pub fn gate_event(&mut self) -> bool {
        self.rng.random::<f64>() < self.p
    }
}

/// Affine map from [in_lo, in_hi] to [out_lo, out_hi], clamped to the
/// output interval (which may be inverted).
pub fn map_range(value: f64, in_lo: f64, in_hi: f64, out_lo: f64, out_hi: f64) -> Result<f64> {
    if in_lo == in_hi {
        return Err(QacError::Argument(
            "input range is a single point; the map is undefined".into(),
        ));
    }
    let t = (value - in_lo) / (in_hi - in_lo);
    let mapped = out_lo + t * (out_hi - out_lo);
    let (lo, hi) = if out_lo <= out_hi {
        (out_lo, out_hi)
    } else {
        (out_hi, out_lo)
    };
    Ok(mapped.clamp(lo, hi))
}
