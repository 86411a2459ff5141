//! Quantum generators (patch and batch variants), ancilla-based nonlinear
//! projection, the quantum discriminator, and image read-out.
//!
//! Patch layout: a sub-generator runs on N qubits of which the highest
//! `n_ancilla` are post-selected on |0...0>; the remaining low qubits carry
//! the patch pixels in basis-index order.
//!
//! Batch layout (LSB to MSB): data qubits, generator ancillas, discriminator
//! ancillas, index register. The generator circuit acts on data+generator
//! ancillas, the discriminator on data+discriminator ancillas, and both are
//! identity on the index register.

use serde::{Deserialize, Serialize};

use crate::ansatz::{self, LatentSpec, MpqcSpec, ParamMatrix, ShotMode};
use crate::data::ImageVector;
use crate::error::{Error, Result};
use crate::qsim::{self, StateVector};
use crate::rng::Rng;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatchGeneratorConfig {
    /// Sub-generator count T.
    pub t_subgens: usize,
    /// Qubits per sub-generator.
    pub n_qubits: usize,
    /// Ancilla qubits post-selected for the nonlinear map.
    pub n_ancilla: usize,
    pub mpqc: MpqcSpec,
    pub latent: LatentSpec,
    /// One parameter matrix per sub-generator.
    pub params: Vec<ParamMatrix>,
}

impl PatchGeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_subgens == 0 {
            return Err(Error::InvalidConfig("need at least one sub-generator".into()));
        }
        if self.n_ancilla >= self.n_qubits {
            return Err(Error::InvalidConfig(format!(
                "{} ancillas on {} qubits leaves no data qubit",
                self.n_ancilla, self.n_qubits
            )));
        }
        if self.mpqc.n_qubits != self.n_qubits || self.latent.n_qubits != self.n_qubits {
            return Err(Error::InvalidConfig(
                "MPQC/latent qubit counts must match the sub-generator".into(),
            ));
        }
        if self.params.len() != self.t_subgens {
            return Err(Error::InvalidConfig(format!(
                "{} parameter matrices for {} sub-generators",
                self.params.len(),
                self.t_subgens
            )));
        }
        self.mpqc.validate()?;
        self.latent.validate()
    }

    /// Pixels per patch: 2^(N - N_A).
    pub fn patch_dim(&self) -> usize {
        1 << (self.n_qubits - self.n_ancilla)
    }

    /// Total image dimension M = T * 2^(N - N_A).
    pub fn image_dim(&self) -> usize {
        self.t_subgens * self.patch_dim()
    }

    pub fn n_params(&self) -> usize {
        self.params.iter().map(ParamMatrix::len).sum()
    }

    fn ancilla_qubits(&self) -> Vec<usize> {
        (self.n_qubits - self.n_ancilla..self.n_qubits).collect()
    }
}

pub struct SubgenOutput {
    /// Patch pixel probabilities (sum to 1).
    pub patch: Vec<f64>,
    /// Post-selected state on the data qubits.
    pub state: StateVector,
    /// Ancilla projection success probability (1 when N_A = 0).
    pub success_prob: f64,
}

/// Run sub-generator `t` on a prepared latent state: apply U_{G_t},
/// post-select the ancillas on all-zeros, and read the patch distribution.
pub fn subgen_forward(
    config: &PatchGeneratorConfig,
    t: usize,
    latent_state: &StateVector,
) -> Result<SubgenOutput> {
    config.validate()?;
    if t >= config.t_subgens {
        return Err(Error::InvalidConfig(format!(
            "sub-generator index {t} out of range for T={}",
            config.t_subgens
        )));
    }
    if latent_state.n_qubits() != config.n_qubits {
        return Err(Error::QubitCountMismatch {
            expected: config.n_qubits,
            actual: latent_state.n_qubits(),
        });
    }
    let mut state = latent_state.clone();
    ansatz::apply_mpqc(&mut state, &config.mpqc, &config.params[t])?;
    if config.n_ancilla == 0 {
        let patch = state.probabilities();
        return Ok(SubgenOutput { patch, state, success_prob: 1.0 });
    }
    let ancillas = config.ancilla_qubits();
    let zeros = vec![false; ancillas.len()];
    let (reduced, prob) = state.postselect(&ancillas, &zeros).map_err(|e| match e {
        Error::DegenerateProjection { prob, .. } => Error::DegenerateProjection {
            prob,
            context: format!(" (sub-generator {t})"),
        },
        other => other,
    })?;
    let patch = reduced.probabilities();
    Ok(SubgenOutput { patch, state: reduced, success_prob: prob })
}

/// Concatenate T patches of equal length into one image vector.
pub fn assemble_image(patches: &[Vec<f64>]) -> Result<ImageVector> {
    if patches.is_empty() {
        return Err(Error::EmptyInput("no patches to assemble".into()));
    }
    let len = patches[0].len();
    if patches.iter().any(|p| p.len() != len) {
        return Err(Error::DimensionMismatch {
            context: "patches of unequal length".into(),
        });
    }
    Ok(patches.iter().flatten().copied().collect())
}

/// Forward the whole patch generator for one latent draw. Returns the
/// assembled (probability-space) image and the minimum ancilla success
/// probability across sub-generators.
pub fn patch_generate(
    config: &PatchGeneratorConfig,
    alpha: &[f64],
    mode: ShotMode,
    rng: &mut Rng,
) -> Result<(ImageVector, f64)> {
    let latent = ansatz::prepare_latent_from_angles(&config.latent, alpha)?;
    let mut patches = Vec::with_capacity(config.t_subgens);
    let mut min_prob = 1.0f64;
    for t in 0..config.t_subgens {
        let out = subgen_forward(config, t, &latent)?;
        min_prob = min_prob.min(out.success_prob);
        let patch = match mode {
            ShotMode::Exact => out.patch,
            ShotMode::Shots(k) => {
                let counts = qsim::sample_counts(&out.patch, k, rng)?;
                qsim::frequencies(&counts)
            }
        };
        patches.push(patch);
    }
    Ok((assemble_image(&patches)?, min_prob))
}

/// Sample `count` images from the patch generator, drawing fresh latents.
pub fn patch_generate_images(
    config: &PatchGeneratorConfig,
    count: usize,
    mode: ShotMode,
    rng: &mut Rng,
) -> Result<Vec<ImageVector>> {
    let mut images = Vec::with_capacity(count);
    for _ in 0..count {
        let alpha = config.latent.sample_angles(rng);
        let (img, _) = patch_generate(config, &alpha, mode, rng)?;
        images.push(img);
    }
    Ok(images)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchGanConfig {
    /// Index-register qubits; batch size is 2^{n_index}.
    pub n_index: usize,
    /// Data qubits carrying the pixel distribution.
    pub n_data: usize,
    /// Generator ancillas (nonlinearity for G).
    pub n_anc_gen: usize,
    /// Discriminator ancillas (nonlinearity for D).
    pub n_anc_disc: usize,
    /// Generator MPQC over n_data + n_anc_gen qubits.
    pub gen_spec: MpqcSpec,
    /// Discriminator MPQC over n_data + n_anc_disc qubits.
    pub disc_spec: MpqcSpec,
    /// Latent recipe over the generator's qubits.
    pub latent: LatentSpec,
    pub gen_params: ParamMatrix,
    pub disc_params: ParamMatrix,
}

impl BatchGanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_data == 0 {
            return Err(Error::InvalidConfig("batch GAN needs data qubits".into()));
        }
        let n_gen = self.n_data + self.n_anc_gen;
        let n_disc = self.n_data + self.n_anc_disc;
        if self.gen_spec.n_qubits != n_gen {
            return Err(Error::InvalidConfig(format!(
                "generator circuit has {} qubits, layout needs {}",
                self.gen_spec.n_qubits, n_gen
            )));
        }
        if self.disc_spec.n_qubits != n_disc {
            return Err(Error::InvalidConfig(format!(
                "discriminator circuit has {} qubits, layout needs {}",
                self.disc_spec.n_qubits, n_disc
            )));
        }
        if self.latent.n_qubits != n_gen {
            return Err(Error::InvalidConfig(
                "latent spec must cover the generator qubits".into(),
            ));
        }
        self.gen_spec.validate()?;
        self.disc_spec.validate()?;
        self.latent.validate()
    }

    pub fn total_qubits(&self) -> usize {
        self.n_index + self.n_data + self.n_anc_gen + self.n_anc_disc
    }

    pub fn batch_size(&self) -> usize {
        1 << self.n_index
    }

    pub fn image_dim(&self) -> usize {
        1 << self.n_data
    }

    fn gen_qubits(&self) -> Vec<usize> {
        (0..self.n_data + self.n_anc_gen).collect()
    }

    fn disc_qubits(&self) -> Vec<usize> {
        let mut qs: Vec<usize> = (0..self.n_data).collect();
        let base = self.n_data + self.n_anc_gen;
        qs.extend(base..base + self.n_anc_disc);
        qs
    }

    fn gen_ancilla_qubits(&self) -> Vec<usize> {
        (self.n_data..self.n_data + self.n_anc_gen).collect()
    }

    fn disc_ancilla_qubits(&self) -> Vec<usize> {
        let base = self.n_data + self.n_anc_gen;
        (base..base + self.n_anc_disc).collect()
    }

    pub fn index_qubits(&self) -> Vec<usize> {
        let base = self.n_data + self.n_anc_gen + self.n_anc_disc;
        (base..base + self.n_index).collect()
    }

    /// Output qubit for the discriminator's |0> projector: the last data
    /// qubit.
    fn output_qubit(&self) -> usize {
        self.n_data - 1
    }
}

/// Prepare the batched latent state: a uniform index superposition where
/// branch i carries an independently drawn latent product state on the
/// generator qubits. Built by direct dense assembly. Returns the state and
/// the per-branch latent angles.
pub fn batch_latent_prepare(config: &BatchGanConfig, rng: &mut Rng) -> Result<(StateVector, Vec<Vec<f64>>)> {
    config.validate()?;
    let alphas: Vec<Vec<f64>> = (0..config.batch_size())
        .map(|_| config.latent.sample_angles(rng))
        .collect();
    let state = batch_latent_from_angles(config, &alphas)?;
    Ok((state, alphas))
}

/// Rebuild the batched latent state from stored angles.
pub fn batch_latent_from_angles(config: &BatchGanConfig, alphas: &[Vec<f64>]) -> Result<StateVector> {
    config.validate()?;
    let branches = config.batch_size();
    if alphas.len() != branches {
        return Err(Error::DimensionMismatch {
            context: format!("{} latent draws for {} branches", alphas.len(), branches),
        });
    }
    let n_total = config.total_qubits();
    let feature_dim = 1usize << (n_total - config.n_index);
    let gen_dim = 1usize << (config.n_data + config.n_anc_gen);
    let weight = 1.0 / (branches as f64).sqrt();
    let mut amps = vec![num_complex::Complex64::ZERO; 1 << n_total];
    for (i, alpha) in alphas.iter().enumerate() {
        let branch_state = ansatz::prepare_latent_from_angles(&config.latent, alpha)?;
        for (g, amp) in branch_state.amplitudes().iter().enumerate().take(gen_dim) {
            // Discriminator ancillas stay |0>: their bits in the feature
            // index are zero because g < gen_dim.
            amps[i * feature_dim + g] = amp * weight;
        }
    }
    StateVector::from_amplitudes(n_total, amps)
}

/// Apply the generator circuit to the batched latent state and post-select
/// its ancillas on zeros (global renormalization, qubits kept in place).
/// Returns the generated state and the projection success probability.
pub fn batch_generator_forward(config: &BatchGanConfig, input: &StateVector) -> Result<(StateVector, f64)> {
    config.validate()?;
    if input.n_qubits() != config.total_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: config.total_qubits(),
            actual: input.n_qubits(),
        });
    }
    let mut state = input.clone();
    ansatz::apply_mpqc_on(&mut state, &config.gen_spec, &config.gen_params, &config.gen_qubits())?;
    if config.n_anc_gen == 0 {
        return Ok((state, 1.0));
    }
    let ancillas = config.gen_ancilla_qubits();
    let zeros = vec![false; ancillas.len()];
    state.project(&ancillas, &zeros)
}

#[derive(Clone, Debug)]
pub struct DiscriminatorOutput {
    /// Per index branch: conditional |0> probability of the output qubit.
    pub per_branch: Vec<f64>,
    /// Batch-averaged discriminator output, mean of `per_branch`.
    pub mean: f64,
    /// Discriminator-ancilla projection success probability (1 if none).
    pub success_prob: f64,
}

/// Apply the quantum discriminator to a batch state (real examples via
/// amplitude encoding, fakes via [`batch_generator_forward`]) and read the
/// per-branch classification outputs.
pub fn quantum_discriminator_forward(config: &BatchGanConfig, state: &StateVector) -> Result<DiscriminatorOutput> {
    config.validate()?;
    if state.n_qubits() != config.total_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: config.total_qubits(),
            actual: state.n_qubits(),
        });
    }
    let mut s = state.clone();
    ansatz::apply_mpqc_on(&mut s, &config.disc_spec, &config.disc_params, &config.disc_qubits())?;
    let mut success_prob = 1.0;
    if config.n_anc_disc > 0 {
        let ancillas = config.disc_ancilla_qubits();
        let zeros = vec![false; ancillas.len()];
        let (projected, prob) = s.project(&ancillas, &zeros)?;
        s = projected;
        success_prob = prob;
    }
    let branches = config.batch_size();
    let out_bit = 1usize << config.output_qubit();
    let n_feature = config.total_qubits() - config.n_index;
    let mut branch_mass = vec![0.0f64; branches];
    let mut branch_zero = vec![0.0f64; branches];
    for (idx, p) in s.probabilities().iter().enumerate() {
        let i = idx >> n_feature;
        branch_mass[i] += p;
        if idx & out_bit == 0 {
            branch_zero[i] += p;
        }
    }
    let mut per_branch = Vec::with_capacity(branches);
    for i in 0..branches {
        if branch_mass[i] < 1e-12 {
            return Err(Error::DegenerateProjection {
                prob: branch_mass[i],
                context: format!(" (index branch {i})"),
            });
        }
        per_branch.push(branch_zero[i] / branch_mass[i]);
    }
    let mean = per_branch.iter().sum::<f64>() / branches as f64;
    Ok(DiscriminatorOutput { per_branch, mean, success_prob })
}

/// Conditional pixel distributions of a batch state: entry i is
/// P(data = j | index = i), one probability-space image per branch.
pub fn batch_conditional_images(config: &BatchGanConfig, state: &StateVector) -> Result<Vec<ImageVector>> {
    let branches = config.batch_size();
    let n_feature = config.total_qubits() - config.n_index;
    let data_mask = (1usize << config.n_data) - 1;
    let mut joint = vec![vec![0.0f64; config.image_dim()]; branches];
    let mut mass = vec![0.0f64; branches];
    for (idx, p) in state.probabilities().iter().enumerate() {
        let i = idx >> n_feature;
        let j = idx & data_mask;
        joint[i][j] += p;
        mass[i] += p;
    }
    for (i, img) in joint.iter_mut().enumerate() {
        if mass[i] < 1e-12 {
            return Err(Error::DegenerateProjection {
                prob: mass[i],
                context: format!(" (index branch {i})"),
            });
        }
        for p in img.iter_mut() {
            *p /= mass[i];
        }
    }
    Ok(joint)
}

const SHOT_RETRY_CAP: usize = 10;

/// Sample `count` images from the batch generator. Exact mode reads the
/// conditional distributions; shot mode estimates them from sampled counts
/// conditioned on the index register, retrying (up to a cap) if a branch
/// receives no counts.
pub fn batch_generate_images(
    config: &BatchGanConfig,
    count: usize,
    mode: ShotMode,
    rng: &mut Rng,
) -> Result<Vec<ImageVector>> {
    let mut images = Vec::with_capacity(count);
    while images.len() < count {
        let (latent, _) = batch_latent_prepare(config, rng)?;
        let (state, _) = batch_generator_forward(config, &latent)?;
        let batch = match mode {
            ShotMode::Exact => batch_conditional_images(config, &state)?,
            ShotMode::Shots(k) => shot_conditional_images(config, &state, k, rng)?,
        };
        for img in batch {
            if images.len() < count {
                images.push(img);
            }
        }
    }
    Ok(images)
}

fn shot_conditional_images(
    config: &BatchGanConfig,
    state: &StateVector,
    shots: u64,
    rng: &mut Rng,
) -> Result<Vec<ImageVector>> {
    let branches = config.batch_size();
    let n_feature = config.total_qubits() - config.n_index;
    let data_mask = (1usize << config.n_data) - 1;
    let probs = state.probabilities();
    for attempt in 0..SHOT_RETRY_CAP {
        let counts = qsim::sample_counts(&probs, shots, rng)?;
        let mut per_branch = vec![vec![0u64; config.image_dim()]; branches];
        let mut totals = vec![0u64; branches];
        for (idx, &c) in counts.iter().enumerate() {
            let i = idx >> n_feature;
            per_branch[i][idx & data_mask] += c;
            totals[i] += c;
        }
        if let Some(empty) = totals.iter().position(|&t| t == 0) {
            if attempt + 1 == SHOT_RETRY_CAP {
                return Err(Error::EmptyBranch { branch: empty, retries: SHOT_RETRY_CAP });
            }
            continue;
        }
        return Ok(per_branch
            .iter()
            .zip(&totals)
            .map(|(c, &t)| c.iter().map(|&x| x as f64 / t as f64).collect())
            .collect());
    }
    unreachable!()
}
