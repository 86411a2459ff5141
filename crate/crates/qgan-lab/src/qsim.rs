//! Dense state-vector simulation of RY/CZ circuits.
//!
//! Qubit ordering convention: qubit `q` is the `q`-th least-significant bit
//! of the basis index. The basis index therefore reads qubit `N-1 ... 0`
//! from left to right in binary. All downstream pixel orderings follow
//! basis-index order.

use num_complex::Complex64;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Default cap on the simulated qubit count. Overridable via
/// [`StateVector::zero_with_cap`].
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// A pure N-qubit state as a dense vector of 2^N complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// One gate of the supported set.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum GateOp {
    Ry { qubit: usize, angle: f64 },
    Cz { control: usize, target: usize },
    Identity,
}

impl StateVector {
    /// |0...0> on `n_qubits` qubits, subject to the default resource cap.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::zero_with_cap(n_qubits, DEFAULT_QUBIT_CAP)
    }

    /// |0...0> with an explicit qubit cap.
    pub fn zero_with_cap(n_qubits: usize, cap: usize) -> Result<Self> {
        if n_qubits < 1 || n_qubits > cap {
            return Err(Error::TooManyQubits { n_qubits, cap });
        }
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[0] = Complex64::ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Build a state from raw amplitudes; checks length and normalization.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} amplitudes for {} qubits (need {})",
                    amps.len(),
                    n_qubits,
                    1usize << n_qubits
                ),
            });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidProbabilities {
                context: format!("squared norm {norm_sq} differs from 1"),
            });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Apply RY(angle) = [[cos a/2, -sin a/2], [sin a/2, cos a/2]] on `qubit`.
    pub fn apply_ry(&mut self, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let c = (angle / 2.0).cos();
        let s = (angle / 2.0).sin();
        let mask = 1usize << qubit;
        for base in 0..self.amps.len() {
            if base & mask == 0 {
                let a0 = self.amps[base];
                let a1 = self.amps[base | mask];
                self.amps[base] = c * a0 - s * a1;
                self.amps[base | mask] = s * a0 + c * a1;
            }
        }
        Ok(())
    }

    /// Apply CZ on the (symmetric) pair of qubits.
    pub fn apply_cz(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::DuplicateQubit(control));
        }
        let mask = (1usize << control) | (1usize << target);
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if idx & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: GateOp) -> Result<()> {
        match gate {
            GateOp::Ry { qubit, angle } => self.apply_ry(qubit, angle),
            GateOp::Cz { control, target } => self.apply_cz(control, target),
            GateOp::Identity => Ok(()),
        }
    }

    /// Measurement probabilities over the full computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Project the given qubits onto the given bit pattern, renormalize, and
    /// trace the measured qubits out. Returns the reduced state and the
    /// success probability.
    pub fn postselect(&self, qubits: &[usize], outcome: &[bool]) -> Result<(StateVector, f64)> {
        let (kept, prob) = self.project_raw(qubits, outcome)?;
        if self.n_qubits == qubits.len() {
            return Err(Error::InvalidConfig(
                "postselect must leave at least one qubit".into(),
            ));
        }
        let n_rem = self.n_qubits - qubits.len();
        let mut reduced = vec![Complex64::ZERO; 1 << n_rem];
        let scale = 1.0 / prob.sqrt();
        let mut measured: Vec<usize> = qubits.to_vec();
        measured.sort_unstable();
        for (idx, amp) in kept {
            // Drop the measured bits from the basis index, low bits first.
            let mut out = 0usize;
            let mut out_bit = 0usize;
            let mut m_iter = measured.iter().peekable();
            for bit in 0..self.n_qubits {
                if m_iter.peek() == Some(&&bit) {
                    m_iter.next();
                    continue;
                }
                if idx & (1 << bit) != 0 {
                    out |= 1 << out_bit;
                }
                out_bit += 1;
            }
            reduced[out] = amp * scale;
        }
        Ok((
            StateVector {
                n_qubits: n_rem,
                amps: reduced,
            },
            prob,
        ))
    }

    /// Like [`postselect`](Self::postselect) but keeps the measured qubits in
    /// place (pinned to the outcome). Used where later gates still address
    /// the full register.
    pub fn project(&self, qubits: &[usize], outcome: &[bool]) -> Result<(StateVector, f64)> {
        let (kept, prob) = self.project_raw(qubits, outcome)?;
        let mut amps = vec![Complex64::ZERO; self.amps.len()];
        let scale = 1.0 / prob.sqrt();
        for (idx, amp) in kept {
            amps[idx] = amp * scale;
        }
        Ok((
            StateVector {
                n_qubits: self.n_qubits,
                amps,
            },
            prob,
        ))
    }

    fn project_raw(&self, qubits: &[usize], outcome: &[bool]) -> Result<(Vec<(usize, Complex64)>, f64)> {
        if qubits.len() != outcome.len() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} measured qubits but {} outcome bits",
                    qubits.len(),
                    outcome.len()
                ),
            });
        }
        let mut seen = vec![false; self.n_qubits];
        let mut mask = 0usize;
        let mut pattern = 0usize;
        for (&q, &bit) in qubits.iter().zip(outcome) {
            self.check_qubit(q)?;
            if seen[q] {
                return Err(Error::DuplicateQubit(q));
            }
            seen[q] = true;
            mask |= 1 << q;
            if bit {
                pattern |= 1 << q;
            }
        }
        let mut kept = Vec::new();
        let mut prob = 0.0;
        for (idx, &amp) in self.amps.iter().enumerate() {
            if idx & mask == pattern {
                prob += amp.norm_sqr();
                kept.push((idx, amp));
            }
        }
        if prob < 1e-12 {
            return Err(Error::DegenerateProjection {
                prob,
                context: String::new(),
            });
        }
        Ok((kept, prob))
    }

    /// Marginal probability distribution over a subset of qubits,
    /// in the subset's own bit order (first listed qubit = LSB).
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let mut out = vec![0.0; 1 << qubits.len()];
        for (idx, amp) in self.amps.iter().enumerate() {
            let mut sub = 0usize;
            for (pos, &q) in qubits.iter().enumerate() {
                if idx & (1 << q) != 0 {
                    sub |= 1 << pos;
                }
            }
            out[sub] += amp.norm_sqr();
        }
        Ok(out)
    }
}

/// Multinomial draw of `shots` samples from `probs`, deterministic given the
/// RNG stream. Returns a dense histogram over basis indices.
pub fn sample_counts(probs: &[f64], shots: u64, rng: &mut Rng) -> Result<Vec<u64>> {
    if shots < 1 {
        return Err(Error::InvalidConfig("shots must be >= 1".into()));
    }
    let mut total = 0.0;
    for &p in probs {
        if p < -1e-12 {
            return Err(Error::InvalidProbabilities {
                context: format!("negative entry {p}"),
            });
        }
        total += p.max(0.0);
    }
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidProbabilities {
            context: format!("entries sum to {total}"),
        });
    }
    // Cumulative inversion; binary search per shot.
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0) / total;
        cdf.push(acc);
    }
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.gen();
        let idx = cdf.partition_point(|&c| c < u).min(probs.len() - 1);
        counts[idx] += 1;
    }
    Ok(counts)
}

/// Empirical frequencies from a histogram.
pub fn frequencies(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}
