//! Multilayer parameterized quantum circuits (MPQC), latent-state
//! preparation, and parameter-shift gradients.
//!
//! An MPQC is L repetitions of (one RY per qubit, then a fixed CZ entangler
//! layer). Layer `l` consumes column `l` of the parameter matrix.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::qsim::StateVector;
use crate::rng::Rng;

/// Circuit shape: qubit count, layer count, and the CZ pair list applied in
/// every layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpqcSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub entangler: Vec<(usize, usize)>,
}

impl MpqcSpec {
    /// Chain entangler: CZ on (0,1), (2,3), ... then (1,2), (3,4), ...
    pub fn chain(n_qubits: usize, n_layers: usize) -> Self {
        let mut entangler = Vec::new();
        let mut q = 0;
        while q + 1 < n_qubits {
            entangler.push((q, q + 1));
            q += 2;
        }
        let mut q = 1;
        while q + 1 < n_qubits {
            entangler.push((q, q + 1));
            q += 2;
        }
        Self {
            n_qubits,
            n_layers,
            entangler,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_layers == 0 {
            return Err(Error::InvalidConfig(
                "MPQC needs at least one qubit and one layer".into(),
            ));
        }
        for &(a, b) in &self.entangler {
            if a >= self.n_qubits || b >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: a.max(b),
                    n_qubits: self.n_qubits,
                });
            }
            if a == b {
                return Err(Error::DuplicateQubit(a));
            }
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.n_qubits * self.n_layers
    }
}

/// Trainable rotation angles, N x L.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamMatrix {
    pub n_qubits: usize,
    pub n_layers: usize,
    theta: Vec<f64>,
}

impl ParamMatrix {
    pub fn zeros(spec: &MpqcSpec) -> Self {
        Self {
            n_qubits: spec.n_qubits,
            n_layers: spec.n_layers,
            theta: vec![0.0; spec.n_params()],
        }
    }

    /// Uniform(low, high) initialization, seeded.
    pub fn random(spec: &MpqcSpec, rng: &mut Rng, low: f64, high: f64) -> Self {
        Self {
            n_qubits: spec.n_qubits,
            n_layers: spec.n_layers,
            theta: (0..spec.n_params()).map(|_| rng.gen_range(low..high)).collect(),
        }
    }

    pub fn from_vec(n_qubits: usize, n_layers: usize, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != n_qubits * n_layers {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} angles for a {}x{} parameter matrix",
                    theta.len(),
                    n_qubits,
                    n_layers
                ),
            });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("parameter matrix entry".into()));
        }
        Ok(Self {
            n_qubits,
            n_layers,
            theta,
        })
    }

    /// Angle for qubit `i` in layer `l`.
    pub fn get(&self, qubit: usize, layer: usize) -> f64 {
        self.theta[layer * self.n_qubits + qubit]
    }

    pub fn set(&mut self, qubit: usize, layer: usize, value: f64) {
        self.theta[layer * self.n_qubits + qubit] = value;
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    fn shifted(&self, entry: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.theta[entry] += delta;
        out
    }
}

/// Latent-state recipe: RY(alpha_i) on the active qubits, identity elsewhere,
/// alpha ~ unif(low, high).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatentSpec {
    pub n_qubits: usize,
    pub active: Vec<usize>,
    pub low: f64,
    pub high: f64,
}

impl LatentSpec {
    /// All qubits active with the default unif(0, pi) distribution.
    pub fn full(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            active: (0..n_qubits).collect(),
            low: 0.0,
            high: PI,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.low >= self.high {
            return Err(Error::InvalidConfig(format!(
                "latent distribution needs low < high, got ({}, {})",
                self.low, self.high
            )));
        }
        for &q in &self.active {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        Ok(())
    }

    /// Draw the rotation angles for one latent sample.
    pub fn sample_angles(&self, rng: &mut Rng) -> Vec<f64> {
        self.active
            .iter()
            .map(|_| rng.gen_range(self.low..self.high))
            .collect()
    }
}

/// Sample a latent state; returns the state and the drawn angles for logging.
pub fn prepare_latent(spec: &LatentSpec, rng: &mut Rng) -> Result<(StateVector, Vec<f64>)> {
    spec.validate()?;
    let alpha = spec.sample_angles(rng);
    let state = prepare_latent_from_angles(spec, &alpha)?;
    Ok((state, alpha))
}

/// Rebuild the latent state from previously drawn angles.
pub fn prepare_latent_from_angles(spec: &LatentSpec, alpha: &[f64]) -> Result<StateVector> {
    spec.validate()?;
    if alpha.len() != spec.active.len() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "{} angles for {} active qubits",
                alpha.len(),
                spec.active.len()
            ),
        });
    }
    let mut state = StateVector::zero(spec.n_qubits)?;
    for (&q, &a) in spec.active.iter().zip(alpha) {
        state.apply_ry(q, a)?;
    }
    Ok(state)
}

/// Apply the full MPQC in place.
pub fn apply_mpqc(state: &mut StateVector, spec: &MpqcSpec, params: &ParamMatrix) -> Result<()> {
    let identity: Vec<usize> = (0..spec.n_qubits).collect();
    apply_mpqc_on(state, spec, params, &identity)
}

/// Apply the MPQC with its logical qubits mapped onto `qubit_map` of a larger
/// register. `qubit_map[i]` is the physical qubit carrying logical qubit `i`.
pub fn apply_mpqc_on(
    state: &mut StateVector,
    spec: &MpqcSpec,
    params: &ParamMatrix,
    qubit_map: &[usize],
) -> Result<()> {
    spec.validate()?;
    if params.n_qubits != spec.n_qubits || params.n_layers != spec.n_layers {
        return Err(Error::DimensionMismatch {
            context: format!(
                "parameter matrix {}x{} for a {}x{} circuit",
                params.n_qubits, params.n_layers, spec.n_qubits, spec.n_layers
            ),
        });
    }
    if qubit_map.len() != spec.n_qubits {
        return Err(Error::DimensionMismatch {
            context: format!(
                "qubit map of length {} for {} circuit qubits",
                qubit_map.len(),
                spec.n_qubits
            ),
        });
    }
    for layer in 0..spec.n_layers {
        for qubit in 0..spec.n_qubits {
            state.apply_ry(qubit_map[qubit], params.get(qubit, layer))?;
        }
        for &(a, b) in &spec.entangler {
            state.apply_cz(qubit_map[a], qubit_map[b])?;
        }
    }
    Ok(())
}

/// Shot handling for read-outs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ShotMode {
    /// Infinite-shot limit: read the full probability vector.
    Exact,
    /// Estimate probabilities from a finite multinomial draw.
    Shots(u64),
}

impl ShotMode {
    pub fn is_exact(self) -> bool {
        matches!(self, ShotMode::Exact)
    }
}

/// Evaluate a scalar read-out of the measurement distribution, exactly or
/// from sampled counts.
pub fn expectation<F>(state: &StateVector, readout: F, mode: ShotMode, rng: &mut Rng) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let probs = state.probabilities();
    match mode {
        ShotMode::Exact => Ok(readout(&probs)),
        ShotMode::Shots(k) => {
            let counts = crate::qsim::sample_counts(&probs, k, rng)?;
            Ok(readout(&crate::qsim::frequencies(&counts)))
        }
    }
}

/// Identifies one loss evaluation inside a gradient computation, so callers
/// can derive a deterministic RNG stream per evaluation.
#[derive(Clone, Copy, Debug)]
pub struct EvalTag {
    pub entry: usize,
    pub positive: bool,
}

/// Parameter-shift gradient: entry i of the result is
/// [loss(theta_i + pi/2) - loss(theta_i - pi/2)] / 2.
///
/// Evaluations are independent and run in parallel. For expectation-linear
/// read-outs this is the exact derivative; for composite losses it is the
/// defined update direction (the same estimator the training loops use).
pub fn parameter_shift_grad<F>(params: &ParamMatrix, loss: F) -> Result<ParamMatrix>
where
    F: Fn(&ParamMatrix, EvalTag) -> Result<f64> + Sync,
{
    let grads: Vec<f64> = (0..params.len())
        .into_par_iter()
        .map(|entry| -> Result<f64> {
            let plus = loss(
                &params.shifted(entry, FRAC_PI_2),
                EvalTag { entry, positive: true },
            )?;
            let minus = loss(
                &params.shifted(entry, -FRAC_PI_2),
                EvalTag { entry, positive: false },
            )?;
            Ok((plus - minus) / 2.0)
        })
        .collect::<Result<_>>()?;
    ParamMatrix::from_vec(params.n_qubits, params.n_layers, grads)
}

/// Central finite differences, for validating the shift rule on nonlinear
/// read-outs.
pub fn finite_difference_grad<F>(params: &ParamMatrix, h: f64, loss: F) -> Result<ParamMatrix>
where
    F: Fn(&ParamMatrix, EvalTag) -> Result<f64> + Sync,
{
    let grads: Vec<f64> = (0..params.len())
        .into_par_iter()
        .map(|entry| -> Result<f64> {
            let plus = loss(&params.shifted(entry, h), EvalTag { entry, positive: true })?;
            let minus = loss(&params.shifted(entry, -h), EvalTag { entry, positive: false })?;
            Ok((plus - minus) / (2.0 * h))
        })
        .collect::<Result<_>>()?;
    ParamMatrix::from_vec(params.n_qubits, params.n_layers, grads)
}
