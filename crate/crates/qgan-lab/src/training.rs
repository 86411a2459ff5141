//! Training loops: minimax adversarial training for the quantum patch and
//! batch generators and for classical baselines, plus the kernel-moment
//! (MMD) Gaussian loading experiment and the optimal-discriminator oracle.

use std::f64::consts::LN_2;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ansatz::{self, ParamMatrix, ShotMode};
use crate::classical::{CnnGenerator, MlpGradients, MlpNetwork, Optimizer};
use crate::data::ImageVector;
use crate::error::{Error, Result};
use crate::metrics;
use crate::qgan::{self, BatchGanConfig, PatchGeneratorConfig};
use crate::qsim::StateVector;
use crate::rng::{self, Rng};

/// Discriminator outputs are clamped into [eps, 1-eps] before taking logs.
pub const CLAMP_EPS: f64 = 1e-7;

/// Discriminator loss at the minimax equilibrium (both outputs at 1/2).
pub const EQUILIBRIUM_DISC_LOSS: f64 = 2.0 * LN_2;

fn clamp_prob(d: f64) -> f64 {
    d.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS)
}

/// Binary cross-entropy discriminator loss:
/// -mean(log d_real) - mean(log(1 - d_fake)).
pub fn disc_loss(d_real: &[f64], d_fake: &[f64]) -> f64 {
    let lr: f64 = d_real.iter().map(|&d| clamp_prob(d).ln()).sum::<f64>() / d_real.len() as f64;
    let lf: f64 = d_fake.iter().map(|&d| (1.0 - clamp_prob(d)).ln()).sum::<f64>() / d_fake.len() as f64;
    -lr - lf
}

/// Generator loss: minimax mean(log(1 - d)) or the non-saturating
/// alternative -mean(log d).
pub fn gen_loss(d_fake: &[f64], non_saturating: bool) -> f64 {
    let n = d_fake.len() as f64;
    if non_saturating {
        -d_fake.iter().map(|&d| clamp_prob(d).ln()).sum::<f64>() / n
    } else {
        d_fake.iter().map(|&d| (1.0 - clamp_prob(d)).ln()).sum::<f64>() / n
    }
}

fn gen_loss_upstream(d: f64, non_saturating: bool) -> (f64, f64) {
    let dc = clamp_prob(d);
    if non_saturating {
        (-dc.ln(), -1.0 / dc)
    } else {
        ((1.0 - dc).ln(), -1.0 / (1.0 - dc))
    }
}

/// The discriminator maximizing E_data[log D] + E_g[log(1-D)] over a finite
/// support: D*(x) = p_data(x) / (p_data(x) + p_g(x)).
pub fn optimal_discriminator(p_data: &[f64], p_g: &[f64]) -> Result<Vec<f64>> {
    if p_data.len() != p_g.len() {
        return Err(Error::DimensionMismatch {
            context: format!("distributions of length {} vs {}", p_data.len(), p_g.len()),
        });
    }
    Ok(p_data
        .iter()
        .zip(p_g)
        .map(|(&pd, &pg)| if pd + pg > 0.0 { pd / (pd + pg) } else { 0.5 })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptKind {
    Sgd,
    Adam,
}

/// Shared training hyperparameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    pub iterations: usize,
    /// Evaluate the Fréchet Distance every this many iterations (and at the
    /// final iteration).
    pub eval_every: usize,
    pub lr_gen: f64,
    pub lr_disc: f64,
    /// Mini-batch size (latent draws / real samples per step).
    pub batch_size: usize,
    /// Discriminator updates per generator update.
    pub disc_steps: usize,
    /// Generated sample count per Fréchet evaluation.
    pub eval_samples: usize,
    /// Measurement shots per read-out; None means exact probabilities.
    pub shots: Option<u64>,
    pub seed: u64,
    /// When false, elapsed_ms is recorded as 0 so record files are
    /// byte-reproducible across machines.
    pub record_timing: bool,
    /// De-normalization factor applied to pixel vectors before evaluation.
    pub scale: f64,
    pub disc_opt: OptKind,
    /// Optimizer for the generator parameters.
    pub gen_opt: OptKind,
    /// SGD momentum (Nesterov) when used; 0 disables it.
    pub momentum: f64,
    /// Use the non-saturating generator loss instead of minimax.
    pub non_saturating: bool,
    /// Abort when any post-selection success probability drops below this.
    pub prob_floor: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            iterations: 350,
            eval_every: 50,
            lr_gen: 0.05,
            lr_disc: 0.001,
            batch_size: 1,
            disc_steps: 1,
            eval_samples: 1000,
            shots: None,
            seed: 7,
            record_timing: false,
            scale: 1.0,
            disc_opt: OptKind::Adam,
            gen_opt: OptKind::Sgd,
            momentum: 0.0,
            non_saturating: false,
            prob_floor: 1e-6,
        }
    }
}

impl TrainConfig {
    pub fn shot_mode(&self) -> ShotMode {
        match self.shots {
            Some(k) => ShotMode::Shots(k),
            None => ShotMode::Exact,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.eval_every == 0 || self.batch_size == 0 || self.disc_steps == 0 {
            return Err(Error::InvalidConfig("iteration/batch counts must be positive".into()));
        }
        if self.lr_gen <= 0.0 || self.lr_disc <= 0.0 || !self.lr_gen.is_finite() || !self.lr_disc.is_finite() {
            return Err(Error::InvalidConfig("learning rates must be positive and finite".into()));
        }
        if self.eval_samples == 0 {
            return Err(Error::InvalidConfig("eval_samples must be positive".into()));
        }
        if self.scale <= 0.0 {
            return Err(Error::InvalidConfig("scale must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig("momentum must lie in [0, 1)".into()));
        }
        Ok(())
    }

    fn disc_optimizer(&self) -> Optimizer {
        match self.disc_opt {
            OptKind::Adam => Optimizer::adam(self.lr_disc),
            OptKind::Sgd if self.momentum > 0.0 => Optimizer::sgd_nesterov(self.lr_disc, self.momentum),
            OptKind::Sgd => Optimizer::sgd(self.lr_disc),
        }
    }

    fn gen_optimizer(&self) -> Optimizer {
        match self.gen_opt {
            OptKind::Adam => Optimizer::adam(self.lr_gen),
            OptKind::Sgd if self.momentum > 0.0 => Optimizer::sgd_nesterov(self.lr_gen, self.momentum),
            OptKind::Sgd => Optimizer::sgd(self.lr_gen),
        }
    }
}

/// One row of the training log.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainRecord {
    pub iteration: usize,
    pub disc_loss: f64,
    pub gen_loss: f64,
    pub d_real_mean: f64,
    pub d_fake_mean: f64,
    /// Fréchet Distance on the raw pixel scale; None between evaluations.
    pub fd: Option<f64>,
    /// Smallest ancilla-projection success probability seen this iteration
    /// (1 for classical models).
    pub postselect_min_prob: f64,
    pub elapsed_ms: u64,
    pub seed: u64,
}

/// Result of a training run. `aborted` carries a reason when the loop
/// stopped early (non-finite loss or a degenerate projection); the records
/// gathered so far are still returned.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub records: Vec<TrainRecord>,
    pub aborted: Option<String>,
}

impl TrainOutcome {
    pub fn final_fd(&self) -> Option<f64> {
        self.records.iter().rev().find_map(|r| r.fd)
    }

    pub fn first_fd(&self) -> Option<f64> {
        self.records.iter().find_map(|r| r.fd)
    }
}

/// Write the training log as CSV. The column set is fixed; `fd` is left
/// empty on iterations without an evaluation.
pub fn write_records_csv(path: &Path, records: &[TrainRecord]) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        file,
        "iteration,disc_loss,gen_loss,d_real_mean,d_fake_mean,fd,postselect_min_prob,elapsed_ms,seed"
    )?;
    for r in records {
        let fd = r.fd.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            file,
            "{},{},{},{},{},{},{},{},{}",
            r.iteration, r.disc_loss, r.gen_loss, r.d_real_mean, r.d_fake_mean, fd, r.postselect_min_prob, r.elapsed_ms, r.seed
        )?;
    }
    Ok(())
}

// Stream ids for deterministic per-purpose randomness.
const STREAM_LATENT: u64 = 11;
const STREAM_REAL: u64 = 12;
const STREAM_EVAL: u64 = 13;
const STREAM_SHIFT: u64 = 14;
const STREAM_NOISE: u64 = 15;

fn eval_due(iter: usize, cfg: &TrainConfig) -> bool {
    iter % cfg.eval_every == 0 || iter + 1 == cfg.iterations
}

fn sample_real_indices(n: usize, count: usize, r: &mut Rng) -> Vec<usize> {
    use rand::Rng as _;
    (0..count).map(|_| r.gen_range(0..n)).collect()
}

fn scale_images(images: &[ImageVector], factor: f64) -> Vec<ImageVector> {
    images
        .iter()
        .map(|img| img.iter().map(|&p| p * factor).collect())
        .collect()
}

fn fd_against_real(real: &[ImageVector], fake: &[ImageVector], scale: f64) -> Result<f64> {
    metrics::fd_score(&scale_images(real, scale), &scale_images(fake, scale))
}

fn disc_scalar(disc: &MlpNetwork, image: &[f64]) -> Result<f64> {
    Ok(disc.forward(image)?.output()[0])
}

/// One discriminator gradient over a real/fake mini-batch. Returns the flat
/// gradient, the loss, and the mean outputs on each side.
fn disc_batch_gradient(
    disc: &MlpNetwork,
    reals: &[&ImageVector],
    fakes: &[ImageVector],
) -> Result<(Vec<f64>, f64, f64, f64)> {
    let mut grads = MlpGradients::zeros_like(disc);
    let mut d_real_sum = 0.0;
    let mut d_fake_sum = 0.0;
    for img in reals {
        let cache = disc.forward(img)?;
        let d = clamp_prob(cache.output()[0]);
        d_real_sum += cache.output()[0];
        // L contribution -log(d)/n_real.
        let (g, _) = disc.backward(&cache, &[-1.0 / (d * reals.len() as f64)]);
        grads.add(&g);
    }
    for img in fakes {
        let cache = disc.forward(img)?;
        let d = clamp_prob(cache.output()[0]);
        d_fake_sum += cache.output()[0];
        // L contribution -log(1-d)/n_fake.
        let (g, _) = disc.backward(&cache, &[1.0 / ((1.0 - d) * fakes.len() as f64)]);
        grads.add(&g);
    }
    let d_real = d_real_sum / reals.len() as f64;
    let d_fake = d_fake_sum / fakes.len() as f64;
    let loss = disc_loss(
        &reals.iter().map(|i| disc_scalar(disc, i)).collect::<Result<Vec<_>>>()?,
        &fakes.iter().map(|i| disc_scalar(disc, i)).collect::<Result<Vec<_>>>()?,
    );
    Ok((grads.flatten(), loss, d_real, d_fake))
}

fn shift_rng(seed: u64, iter: usize, extra: &[u64]) -> Rng {
    let mut parts = vec![STREAM_SHIFT, iter as u64];
    parts.extend_from_slice(extra);
    rng::stream(seed, rng::mix(&parts))
}

/// Adversarial training of the patch quantum generator against a classical
/// network discriminator. The generator parameters inside `config` and the
/// discriminator weights are updated in place. `real` must hold normalized
/// (unit-sum) pixel vectors.
pub fn train_patch_gan(
    config: &mut PatchGeneratorConfig,
    disc: &mut MlpNetwork,
    real: &[ImageVector],
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    config.validate()?;
    if real.is_empty() {
        return Err(Error::EmptyInput("empty real dataset".into()));
    }
    let mut disc_opt = cfg.disc_optimizer();
    let mut gen_opts: Vec<Optimizer> = (0..config.t_subgens).map(|_| cfg.gen_optimizer()).collect();
    let mut records = Vec::with_capacity(cfg.iterations);
    let mut aborted = None;

    'outer: for iter in 0..cfg.iterations {
        let start = Instant::now();
        let mut latent_rng = rng::stream(cfg.seed, rng::mix(&[STREAM_LATENT, iter as u64]));
        let mut real_rng = rng::stream(cfg.seed, rng::mix(&[STREAM_REAL, iter as u64]));
        let alphas: Vec<Vec<f64>> = (0..cfg.batch_size).map(|_| config.latent.sample_angles(&mut latent_rng)).collect();

        // Forward the generator once per latent for the discriminator step.
        let mut min_prob = 1.0f64;
        let mut fakes = Vec::with_capacity(alphas.len());
        for (j, alpha) in alphas.iter().enumerate() {
            let mut r = shift_rng(cfg.seed, iter, &[0, j as u64]);
            match qgan::patch_generate(config, alpha, cfg.shot_mode(), &mut r) {
                Ok((img, p)) => {
                    min_prob = min_prob.min(p);
                    fakes.push(img);
                }
                Err(e) => {
                    aborted = Some(format!("iteration {iter}: {e}"));
                    break 'outer;
                }
            }
        }
        if min_prob < cfg.prob_floor {
            aborted = Some(format!(
                "iteration {iter}: post-selection success probability {min_prob:.3e} fell below the floor {:.3e}",
                cfg.prob_floor
            ));
            break 'outer;
        }

        let mut last_disc_loss = 0.0;
        let mut last_d_real = 0.0;
        let mut last_d_fake = 0.0;
        for _ in 0..cfg.disc_steps {
            let idx = sample_real_indices(real.len(), cfg.batch_size, &mut real_rng);
            let reals: Vec<&ImageVector> = idx.iter().map(|&i| &real[i]).collect();
            let (flat_grad, loss, dr, df) = disc_batch_gradient(disc, &reals, &fakes)?;
            if !loss.is_finite() {
                aborted = Some(format!("iteration {iter}: non-finite discriminator loss"));
                break 'outer;
            }
            let mut params = disc.flatten_params();
            disc_opt.step(&mut params, &flat_grad)?;
            disc.set_params(&params)?;
            last_disc_loss = loss;
            last_d_real = dr;
            last_d_fake = df;
        }

        // Generator step: parameter-shift through the full read-out chain,
        // sub-generator by sub-generator, with the latents held fixed.
        let gen_loss_val;
        for t in 0..config.t_subgens {
            let frozen = config.clone();
            let disc_ref = &*disc;
            let alphas_ref = &alphas;
            let result = ansatz::parameter_shift_grad(&config.params[t], |theta, tag| {
                let mut probe = frozen.clone();
                probe.params[t] = theta.clone();
                let mut loss = 0.0;
                for (j, alpha) in alphas_ref.iter().enumerate() {
                    let mut r = shift_rng(
                        cfg.seed,
                        iter,
                        &[1 + t as u64, tag.entry as u64, tag.positive as u64, j as u64],
                    );
                    let (img, _) = qgan::patch_generate(&probe, alpha, cfg.shot_mode(), &mut r)?;
                    let d = disc_scalar(disc_ref, &img)?;
                    loss += gen_loss(&[d], cfg.non_saturating);
                }
                Ok(loss / alphas_ref.len() as f64)
            });
            let grad = match result {
                Ok(g) => g,
                Err(e) => {
                    aborted = Some(format!("iteration {iter}: {e}"));
                    break 'outer;
                }
            };
            gen_opts[t].step(config.params[t].as_mut_slice(), grad.as_slice())?;
        }
        // Loss at the updated parameters, for the log.
        {
            let ds: Result<Vec<f64>> = fakes.iter().map(|img| disc_scalar(disc, img)).collect();
            gen_loss_val = gen_loss(&ds?, cfg.non_saturating);
        }

        let fd = if eval_due(iter, cfg) {
            let mut eval_rng = rng::stream(cfg.seed, rng::mix(&[STREAM_EVAL, iter as u64]));
            let fake_eval = qgan::patch_generate_images(config, cfg.eval_samples, ShotMode::Exact, &mut eval_rng)?;
            Some(fd_against_real(real, &fake_eval, cfg.scale)?)
        } else {
            None
        };

        records.push(TrainRecord {
            iteration: iter,
            disc_loss: last_disc_loss,
            gen_loss: gen_loss_val,
            d_real_mean: last_d_real,
            d_fake_mean: last_d_fake,
            fd,
            postselect_min_prob: min_prob,
            elapsed_ms: if cfg.record_timing { start.elapsed().as_millis() as u64 } else { 0 },
            seed: cfg.seed,
        });
    }

    Ok(TrainOutcome { records, aborted })
}

fn batch_disc_forward(config: &BatchGanConfig, state: &StateVector) -> Result<(Vec<f64>, f64)> {
    let out = qgan::quantum_discriminator_forward(config, state)?;
    Ok((out.per_branch, out.success_prob))
}

/// Adversarial training of the fully quantum batch GAN: both players are
/// circuits, both trained with the parameter-shift rule and SGD. `real`
/// must hold normalized (unit-sum) pixel vectors of length 2^{n_data}.
pub fn train_batch_gan(config: &mut BatchGanConfig, real: &[ImageVector], cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    config.validate()?;
    if real.is_empty() {
        return Err(Error::EmptyInput("empty real dataset".into()));
    }
    let branches = config.batch_size();
    // Both quantum players use plain SGD at their own learning rates.
    let mut disc_opt = Optimizer::sgd(cfg.lr_disc);
    let mut gen_opt = cfg.gen_optimizer();
    let mut records = Vec::with_capacity(cfg.iterations);
    let mut aborted = None;

    'outer: for iter in 0..cfg.iterations {
        let start = Instant::now();
        let mut latent_rng = rng::stream(cfg.seed, rng::mix(&[STREAM_LATENT, iter as u64]));
        let mut real_rng = rng::stream(cfg.seed, rng::mix(&[STREAM_REAL, iter as u64]));

        let alphas: Vec<Vec<f64>> = (0..branches).map(|_| config.latent.sample_angles(&mut latent_rng)).collect();
        let idx = sample_real_indices(real.len(), branches, &mut real_rng);
        let real_batch: Vec<ImageVector> = idx.iter().map(|&i| real[i].clone()).collect();
        let step = (|| -> Result<(f64, f64, f64, f64, f64)> {
            let real_state = crate::data::batch_amplitude_encode(&real_batch, config)?;

            // Discriminator step: generator output is fixed while phi shifts.
            let latent = qgan::batch_latent_from_angles(config, &alphas)?;
            let (fake_state, gen_prob) = qgan::batch_generator_forward(config, &latent)?;
            let frozen = config.clone();
            let disc_grad = ansatz::parameter_shift_grad(&config.disc_params, |phi, _tag| {
                let mut probe = frozen.clone();
                probe.disc_params = phi.clone();
                let (d_real, _) = batch_disc_forward(&probe, &real_state)?;
                let (d_fake, _) = batch_disc_forward(&probe, &fake_state)?;
                Ok(disc_loss(&d_real, &d_fake))
            })?;
            disc_opt.step(config.disc_params.as_mut_slice(), disc_grad.as_slice())?;

            // Generator step with the updated discriminator.
            let frozen = config.clone();
            let gen_grad = ansatz::parameter_shift_grad(&config.gen_params, |theta, _tag| {
                let mut probe = frozen.clone();
                probe.gen_params = theta.clone();
                let (state, _) = qgan::batch_generator_forward(&probe, &latent)?;
                let (d_fake, _) = batch_disc_forward(&probe, &state)?;
                Ok(gen_loss(&d_fake, cfg.non_saturating))
            })?;
            gen_opt.step(config.gen_params.as_mut_slice(), gen_grad.as_slice())?;

            // Post-update losses for the log.
            let (d_real, disc_prob_r) = batch_disc_forward(config, &real_state)?;
            let (fake_state, gen_prob2) = {
                let (s, p) = qgan::batch_generator_forward(config, &latent)?;
                (s, p)
            };
            let (d_fake, disc_prob_f) = batch_disc_forward(config, &fake_state)?;
            let dl = disc_loss(&d_real, &d_fake);
            let gl = gen_loss(&d_fake, cfg.non_saturating);
            let dr = d_real.iter().sum::<f64>() / d_real.len() as f64;
            let df = d_fake.iter().sum::<f64>() / d_fake.len() as f64;
            let min_prob = gen_prob.min(gen_prob2).min(disc_prob_r).min(disc_prob_f);
            if !dl.is_finite() || !gl.is_finite() {
                return Err(Error::NonFinite("batch GAN loss".into()));
            }
            Ok((dl, gl, dr, df, min_prob))
        })();

        let (dl, gl, dr, df, min_prob) = match step {
            Ok(v) => v,
            Err(e) => {
                aborted = Some(format!("iteration {iter}: {e}"));
                break 'outer;
            }
        };
        if min_prob < cfg.prob_floor {
            aborted = Some(format!(
                "iteration {iter}: post-selection success probability {min_prob:.3e} fell below the floor {:.3e}",
                cfg.prob_floor
            ));
            break 'outer;
        }

        let fd = if eval_due(iter, cfg) {
            let mut eval_rng = rng::stream(cfg.seed, rng::mix(&[STREAM_EVAL, iter as u64]));
            let fake_eval = qgan::batch_generate_images(config, cfg.eval_samples, ShotMode::Exact, &mut eval_rng)?;
            Some(fd_against_real(real, &fake_eval, cfg.scale)?)
        } else {
            None
        };

        records.push(TrainRecord {
            iteration: iter,
            disc_loss: dl,
            gen_loss: gl,
            d_real_mean: dr,
            d_fake_mean: df,
            fd,
            postselect_min_prob: min_prob,
            elapsed_ms: if cfg.record_timing { start.elapsed().as_millis() as u64 } else { 0 },
            seed: cfg.seed,
        });
    }

    Ok(TrainOutcome { records, aborted })
}

/// Classical generator choices for the baselines.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ClassicalGenerator {
    Mlp(MlpNetwork),
    Cnn(CnnGenerator),
}

impl ClassicalGenerator {
    pub fn noise_dim(&self) -> usize {
        match self {
            ClassicalGenerator::Mlp(net) => net.layer_sizes[0],
            ClassicalGenerator::Cnn(gen) => gen.noise_dim,
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            ClassicalGenerator::Mlp(net) => net.n_params(),
            ClassicalGenerator::Cnn(gen) => gen.n_params(),
        }
    }

    pub fn generate(&self, noise: &[f64]) -> Result<ImageVector> {
        match self {
            ClassicalGenerator::Mlp(net) => Ok(net.forward(noise)?.output().to_vec()),
            ClassicalGenerator::Cnn(gen) => Ok(gen.forward(noise)?.output().to_vec()),
        }
    }

    /// Flat parameter gradient of a scalar loss given dL/d(output pixels).
    fn gradient(&self, noise: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
        match self {
            ClassicalGenerator::Mlp(net) => {
                let cache = net.forward(noise)?;
                let (grads, _) = net.backward(&cache, upstream);
                Ok(grads.flatten())
            }
            ClassicalGenerator::Cnn(gen) => {
                let cache = gen.forward(noise)?;
                Ok(gen.backward(&cache, upstream))
            }
        }
    }

    fn flatten_params(&self) -> Vec<f64> {
        match self {
            ClassicalGenerator::Mlp(net) => net.flatten_params(),
            ClassicalGenerator::Cnn(gen) => gen.flatten_params(),
        }
    }

    fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        match self {
            ClassicalGenerator::Mlp(net) => net.set_params(flat),
            ClassicalGenerator::Cnn(gen) => gen.set_params(flat),
        }
    }

    pub fn sample_images(&self, count: usize, rng: &mut Rng) -> Result<Vec<ImageVector>> {
        use rand::Rng as _;
        let nz = self.noise_dim();
        (0..count)
            .map(|_| {
                let noise: Vec<f64> = (0..nz).map(|_| rng.gen_range(0.0..1.0)).collect();
                self.generate(&noise)
            })
            .collect()
    }
}

/// Adversarial training of a classical generator against a classical
/// discriminator, both updated by backpropagation.
pub fn train_classical_gan(
    gen: &mut ClassicalGenerator,
    disc: &mut MlpNetwork,
    real: &[ImageVector],
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    use rand::Rng as _;
    cfg.validate()?;
    if real.is_empty() {
        return Err(Error::EmptyInput("empty real dataset".into()));
    }
    let mut disc_opt = cfg.disc_optimizer();
    let mut gen_opt = cfg.gen_optimizer();
    let nz = gen.noise_dim();
    let mut records = Vec::with_capacity(cfg.iterations);
    let mut aborted = None;

    'outer: for iter in 0..cfg.iterations {
        let start = Instant::now();
        let mut noise_rng = rng::stream(cfg.seed, rng::mix(&[STREAM_NOISE, iter as u64]));
        let mut real_rng = rng::stream(cfg.seed, rng::mix(&[STREAM_REAL, iter as u64]));
        let noises: Vec<Vec<f64>> = (0..cfg.batch_size)
            .map(|_| (0..nz).map(|_| noise_rng.gen_range(0.0..1.0)).collect())
            .collect();
        let fakes: Vec<ImageVector> = match noises.iter().map(|z| gen.generate(z)).collect() {
            Ok(f) => f,
            Err(e) => {
                aborted = Some(format!("iteration {iter}: {e}"));
                break 'outer;
            }
        };

        let mut last_disc_loss = 0.0;
        let mut last_d_real = 0.0;
        let mut last_d_fake = 0.0;
        for _ in 0..cfg.disc_steps {
            let idx = sample_real_indices(real.len(), cfg.batch_size, &mut real_rng);
            let reals: Vec<&ImageVector> = idx.iter().map(|&i| &real[i]).collect();
            let (flat_grad, loss, dr, df) = disc_batch_gradient(disc, &reals, &fakes)?;
            if !loss.is_finite() {
                aborted = Some(format!("iteration {iter}: non-finite discriminator loss"));
                break 'outer;
            }
            let mut params = disc.flatten_params();
            disc_opt.step(&mut params, &flat_grad)?;
            disc.set_params(&params)?;
            last_disc_loss = loss;
            last_d_real = dr;
            last_d_fake = df;
        }

        // Generator step: backprop the generator loss through D into G.
        let mut gen_grad = vec![0.0; gen.n_params()];
        let mut gl_before = 0.0;
        for z in &noises {
            let img = gen.generate(z)?;
            let cache = disc.forward(&img)?;
            let d = cache.output()[0];
            let (l, dl_dd) = gen_loss_upstream(d, cfg.non_saturating);
            gl_before += l;
            let (_, dinput) = disc.backward(&cache, &[dl_dd]);
            let g = gen.gradient(z, &dinput)?;
            for (acc, gi) in gen_grad.iter_mut().zip(g) {
                *acc += gi / noises.len() as f64;
            }
        }
        let _ = gl_before;
        let mut params = gen.flatten_params();
        gen_opt.step(&mut params, &gen_grad)?;
        gen.set_params(&params)?;

        let ds: Result<Vec<f64>> = noises
            .iter()
            .map(|z| -> Result<f64> { disc_scalar(disc, &gen.generate(z)?) })
            .collect();
        let gl = gen_loss(&ds?, cfg.non_saturating);
        if !gl.is_finite() {
            aborted = Some(format!("iteration {iter}: non-finite generator loss"));
            break 'outer;
        }

        let fd = if eval_due(iter, cfg) {
            let mut eval_rng = rng::stream(cfg.seed, rng::mix(&[STREAM_EVAL, iter as u64]));
            let fake_eval = gen.sample_images(cfg.eval_samples, &mut eval_rng)?;
            Some(fd_against_real(real, &fake_eval, cfg.scale)?)
        } else {
            None
        };

        records.push(TrainRecord {
            iteration: iter,
            disc_loss: last_disc_loss,
            gen_loss: gl,
            d_real_mean: last_d_real,
            d_fake_mean: last_d_fake,
            fd,
            postselect_min_prob: 1.0,
            elapsed_ms: if cfg.record_timing { start.elapsed().as_millis() as u64 } else { 0 },
            seed: cfg.seed,
        });
    }

    Ok(TrainOutcome { records, aborted })
}

/// Configuration for the kernel-moment (MMD) Gaussian loading experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MmdConfig {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub iterations: usize,
    pub lr: f64,
    pub seed: u64,
    /// Target discretized Gaussian over 0..2^n - 1.
    pub target_mean: f64,
    pub target_std: f64,
    /// Gaussian kernel bandwidths, mixed with equal weights.
    pub bandwidths: Vec<f64>,
    pub eval_every: usize,
    /// Gradient-descent variant applied to the circuit parameters.
    pub opt: OptKind,
    /// Measurement shots per distribution read-out; None for exact mode.
    pub shots: Option<u64>,
}

impl Default for MmdConfig {
    fn default() -> Self {
        Self {
            n_qubits: 5,
            n_layers: 5,
            iterations: 800,
            lr: 0.01,
            seed: 7,
            target_mean: 16.0,
            target_std: 4.0,
            bandwidths: vec![0.5, 1.0, 2.0, 4.0],
            eval_every: 50,
            opt: OptKind::Adam,
            shots: None,
        }
    }
}

/// Discretized, normalized Gaussian over the 2^n basis labels.
pub fn discrete_gaussian(dim: usize, mean: f64, std: f64) -> Vec<f64> {
    let mut pi: Vec<f64> = (0..dim)
        .map(|x| (-((x as f64 - mean).powi(2)) / (2.0 * std * std)).exp())
        .collect();
    let total: f64 = pi.iter().sum();
    for p in &mut pi {
        *p /= total;
    }
    pi
}

/// Mixture-of-Gaussians kernel matrix over basis labels.
fn kernel_matrix(dim: usize, bandwidths: &[f64]) -> Vec<f64> {
    let mut k = vec![0.0; dim * dim];
    for x in 0..dim {
        for y in 0..dim {
            let d2 = (x as f64 - y as f64).powi(2);
            let mut v = 0.0;
            for &s in bandwidths {
                v += (-d2 / (2.0 * s * s)).exp();
            }
            k[x * dim + y] = v / bandwidths.len() as f64;
        }
    }
    k
}

fn circuit_probs(spec: &ansatz::MpqcSpec, params: &ParamMatrix) -> Result<Vec<f64>> {
    let mut state = StateVector::zero(spec.n_qubits)?;
    ansatz::apply_mpqc(&mut state, spec, params)?;
    Ok(state.probabilities())
}

fn mmd_value(k: &[f64], diff: &[f64]) -> f64 {
    let dim = diff.len();
    let mut v = 0.0;
    for x in 0..dim {
        for y in 0..dim {
            v += diff[x] * k[x * dim + y] * diff[y];
        }
    }
    v
}

/// Outcome of the MMD loading run.
#[derive(Clone, Debug)]
pub struct MmdOutcome {
    /// (iteration, total-variation distance to the target) at each
    /// evaluation point.
    pub tv_trajectory: Vec<(usize, f64)>,
    pub loss_trajectory: Vec<(usize, f64)>,
    pub final_probs: Vec<f64>,
    pub target: Vec<f64>,
    pub params: ParamMatrix,
}

/// Train an MPQC to load a discretized Gaussian by gradient descent on the
/// squared kernel mean discrepancy (q - pi)^T K (q - pi). The probability
/// read-out is linear in the shifted expectations, so the chain-rule
/// gradient 2 [K (q - pi)]^T dq/dtheta with dq/dtheta from the shift rule
/// is exact.
pub fn train_mmd_gaussian(cfg: &MmdConfig) -> Result<MmdOutcome> {
    if cfg.n_qubits == 0 || cfg.n_layers == 0 || cfg.iterations == 0 || cfg.eval_every == 0 {
        return Err(Error::InvalidConfig("MMD run needs positive sizes".into()));
    }
    if cfg.lr <= 0.0 || cfg.bandwidths.is_empty() {
        return Err(Error::InvalidConfig("MMD run needs a positive rate and bandwidths".into()));
    }
    let spec = ansatz::MpqcSpec::chain(cfg.n_qubits, cfg.n_layers);
    let dim = 1usize << cfg.n_qubits;
    let target = discrete_gaussian(dim, cfg.target_mean, cfg.target_std);
    let kernel = kernel_matrix(dim, &cfg.bandwidths);
    let mut params = ParamMatrix::random(&spec, &mut rng::stream(cfg.seed, 0), 0.0, std::f64::consts::PI);
    let mut opt = match cfg.opt {
        OptKind::Adam => Optimizer::adam(cfg.lr),
        OptKind::Sgd => Optimizer::sgd(cfg.lr),
    };
    let mut tv_trajectory = Vec::new();
    let mut loss_trajectory = Vec::new();
    // Read out the circuit distribution exactly or from K measurement shots;
    // each evaluation gets its own deterministic sub-stream.
    let read = |theta: &ParamMatrix, eval_id: &[u64]| -> Result<Vec<f64>> {
        let probs = circuit_probs(&spec, theta)?;
        match cfg.shots {
            None => Ok(probs),
            Some(k) => {
                let mut r = rng::stream(cfg.seed, rng::mix(eval_id));
                Ok(crate::qsim::frequencies(&crate::qsim::sample_counts(&probs, k, &mut r)?))
            }
        }
    };

    for iter in 0..cfg.iterations {
        let q = read(&params, &[STREAM_NOISE, iter as u64, u64::MAX])?;
        let diff: Vec<f64> = q.iter().zip(&target).map(|(a, b)| a - b).collect();
        if iter % cfg.eval_every == 0 || iter + 1 == cfg.iterations {
            tv_trajectory.push((iter, metrics::tv_distance(&q, &target)?));
            loss_trajectory.push((iter, mmd_value(&kernel, &diff)));
        }
        // kdiff[x] = [K (q - pi)]_x.
        let mut kdiff = vec![0.0; dim];
        for x in 0..dim {
            for y in 0..dim {
                kdiff[x] += kernel[x * dim + y] * diff[y];
            }
        }
        let grad = ansatz::parameter_shift_grad(&params, |theta, tag| {
            let qs = read(theta, &[STREAM_NOISE, iter as u64, tag.entry as u64, tag.positive as u64])?;
            // Linear functional of the shifted distribution; the shift-rule
            // difference of this scalar is the exact chain-rule term.
            Ok(2.0 * qs.iter().zip(&kdiff).map(|(p, k)| p * k).sum::<f64>())
        })?;
        opt.step(params.as_mut_slice(), grad.as_slice())?;
    }

    let final_probs = circuit_probs(&spec, &params)?;
    tv_trajectory.push((cfg.iterations, metrics::tv_distance(&final_probs, &target)?));
    let diff: Vec<f64> = final_probs.iter().zip(&target).map(|(a, b)| a - b).collect();
    loss_trajectory.push((cfg.iterations, mmd_value(&kernel, &diff)));
    Ok(MmdOutcome {
        tv_trajectory,
        loss_trajectory,
        final_probs,
        target,
        params,
    })
}
