//! Command-line interface: dataset generation, training runs for each
//! preset model, Fréchet-Distance evaluation of sample files, and the
//! classical-baseline hyperparameter sweep.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ansatz::{LatentSpec, MpqcSpec, ParamMatrix, ShotMode};
use crate::classical::{
    build_patch_discriminator, CnnGenerator, MlpNetwork, OutputActivation, BAR_DISCRIMINATOR_LAYERS,
    DIGITS_DISCRIMINATOR_LAYERS,
};
use crate::data::{self, BarDatasetConfig, ImageVector};
use crate::error::{Error, Result};
use crate::metrics;
use crate::qgan::{self, BatchGanConfig, PatchGeneratorConfig};
use crate::rng;
use crate::training::{
    self, ClassicalGenerator, MmdConfig, OptKind, TrainConfig, TrainOutcome,
};

#[derive(Parser, Debug)]
#[command(name = "qgan-lab", about = "Quantum and classical GAN laboratory on a state-vector simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Patch quantum generator vs classical discriminator on 2x2 bars.
    BarPatch,
    /// Fully quantum batch GAN on 2x2 bars.
    BarBatch,
    /// Four-sub-generator patch model on 8x8 handwritten digits.
    DigitsPatch,
    /// Fully-connected classical generator baseline on 2x2 bars.
    BarMlp,
    /// Convolutional classical generator baseline on 2x2 bars.
    BarCnn,
    /// Kernel-moment (MMD) Gaussian loading experiment.
    GaussianMmd,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate the gray-scale bar dataset and write it as CSV.
    GenData {
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Image side (images are m x m).
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Number of examples.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Train a preset model; writes config.json, records.csv, checkpoints/
    /// and samples/ under the output directory.
    Train {
        #[arg(long, value_enum)]
        preset: Preset,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Override the preset iteration count.
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        lr_gen: Option<f64>,
        #[arg(long)]
        lr_disc: Option<f64>,
        /// Measurement shots per read-out (default 3000).
        #[arg(long)]
        shots: Option<u64>,
        /// Use exact probabilities instead of finite-shot read-outs.
        #[arg(long, default_value_t = false)]
        exact: bool,
        #[arg(long)]
        eval_every: Option<usize>,
        #[arg(long)]
        eval_samples: Option<usize>,
        /// Record wall-clock times (off keeps record files byte-reproducible).
        #[arg(long, default_value_t = false)]
        record_timing: bool,
        /// Digits data file (required for the digits preset).
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Fréchet Distance between two CSV sample files.
    EvalFd {
        #[arg(long)]
        real: PathBuf,
        #[arg(long)]
        fake: PathBuf,
        /// Multiply pixels by this factor before scoring.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Learning-rate / momentum grid sweep for a classical baseline.
    Sweep {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 150)]
        iterations: usize,
        /// Use the full grid instead of the reduced default.
        #[arg(long, default_value_t = false)]
        full: bool,
        /// Keep checkpoints for this many best configurations.
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
}

/// Patch model for the 2x2 bar task: one sub-generator on 3 qubits
/// (1 ancilla), 3 layers, 9 circuit parameters, against the 97-parameter
/// classical discriminator.
pub fn bar_patch_preset(seed: u64) -> Result<(PatchGeneratorConfig, MlpNetwork)> {
    let mpqc = MpqcSpec::chain(3, 3);
    let params = ParamMatrix::random(&mpqc, &mut rng::stream(seed, 100), 0.0, std::f64::consts::PI);
    let config = PatchGeneratorConfig {
        t_subgens: 1,
        n_qubits: 3,
        n_ancilla: 1,
        mpqc,
        latent: LatentSpec::full(3),
        params: vec![params],
    };
    config.validate()?;
    let disc = build_patch_discriminator(&BAR_DISCRIMINATOR_LAYERS, &mut rng::stream(seed, 101))?;
    Ok((config, disc))
}

/// Fully quantum batch model for the 2x2 bar task: 2 data qubits, one
/// generator ancilla (9 generator parameters over 3 qubits x 3 layers) and
/// one discriminator ancilla (12 discriminator parameters over 3 qubits x
/// 4 layers); no index register.
pub fn bar_batch_preset(seed: u64) -> Result<BatchGanConfig> {
    let gen_spec = MpqcSpec::chain(3, 3);
    let disc_spec = MpqcSpec::chain(3, 4);
    let config = BatchGanConfig {
        n_index: 0,
        n_data: 2,
        n_anc_gen: 1,
        n_anc_disc: 1,
        gen_params: ParamMatrix::random(&gen_spec, &mut rng::stream(seed, 110), 0.0, std::f64::consts::PI),
        disc_params: ParamMatrix::random(&disc_spec, &mut rng::stream(seed, 111), 0.0, std::f64::consts::PI),
        gen_spec,
        disc_spec,
        latent: LatentSpec::full(3),
    };
    config.validate()?;
    Ok(config)
}

/// Patch model for 8x8 digits: four sub-generators on 5 qubits each
/// (1 ancilla, 5 layers; 100 circuit parameters total) against the
/// 5217-parameter classical discriminator.
pub fn digits_patch_preset(seed: u64) -> Result<(PatchGeneratorConfig, MlpNetwork)> {
    let mpqc = MpqcSpec::chain(5, 5);
    let params: Vec<ParamMatrix> = (0..4)
        .map(|t| ParamMatrix::random(&mpqc, &mut rng::stream(seed, 120 + t), 0.0, std::f64::consts::PI))
        .collect();
    let config = PatchGeneratorConfig {
        t_subgens: 4,
        n_qubits: 5,
        n_ancilla: 1,
        mpqc,
        latent: LatentSpec::full(5),
        params,
    };
    config.validate()?;
    let disc = build_patch_discriminator(&DIGITS_DISCRIMINATOR_LAYERS, &mut rng::stream(seed, 130))?;
    Ok((config, disc))
}

/// Fully-connected baseline generator (18 parameters) for the bar task.
pub fn bar_mlp_preset(seed: u64) -> Result<(ClassicalGenerator, MlpNetwork)> {
    let gen = MlpNetwork::new(&[2, 2, 4], OutputActivation::Softmax, &mut rng::stream(seed, 140))?;
    let disc = build_patch_discriminator(&BAR_DISCRIMINATOR_LAYERS, &mut rng::stream(seed, 141))?;
    Ok((ClassicalGenerator::Mlp(gen), disc))
}

/// Convolutional baseline generator (18 parameters) for the bar task.
pub fn bar_cnn_preset(seed: u64) -> Result<(ClassicalGenerator, MlpNetwork)> {
    let gen = CnnGenerator::new(2, 5, &mut rng::stream(seed, 150))?;
    let disc = build_patch_discriminator(&BAR_DISCRIMINATOR_LAYERS, &mut rng::stream(seed, 151))?;
    Ok((ClassicalGenerator::Cnn(gen), disc))
}

/// Preset training hyperparameters.
pub fn preset_train_config(preset: Preset, seed: u64) -> TrainConfig {
    let base = TrainConfig { seed, ..TrainConfig::default() };
    match preset {
        Preset::BarPatch => base.clone(),
        Preset::BarBatch => TrainConfig {
            lr_gen: 0.05,
            lr_disc: 0.05,
            disc_opt: OptKind::Sgd,
            ..base
        },
        Preset::DigitsPatch => TrainConfig {
            eval_samples: 200,
            scale: 1.0,
            ..base
        },
        Preset::BarMlp | Preset::BarCnn => TrainConfig {
            lr_gen: 0.002,
            lr_disc: 0.002,
            momentum: 0.9,
            disc_opt: OptKind::Sgd,
            non_saturating: true,
            ..base
        },
        Preset::GaussianMmd => base,
    }
}

/// Bar training set shared by the bar presets: 1000 unit-sum bar images.
pub fn bar_training_set(seed: u64) -> Result<Vec<ImageVector>> {
    data::generate_bar_dataset(&BarDatasetConfig { m: 2, n_examples: 1000, seed })
}

/// Digits training set: classes 0 and 1, each image normalized to unit sum.
pub fn digits_training_set(path: &Path) -> Result<Vec<ImageVector>> {
    let set = data::load_optdigits(path, &[0, 1])?;
    Ok(set
        .images
        .iter()
        .map(|img| {
            let total: f64 = img.iter().sum();
            img.iter().map(|&p| if total > 0.0 { p / total } else { 0.0 }).collect()
        })
        .collect())
}

#[derive(Serialize)]
struct RunManifest<'a, M: Serialize> {
    preset: Preset,
    train: &'a TrainConfig,
    model: M,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = std::io::BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file)?;
    Ok(())
}

fn prepare_out_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out.join("checkpoints"))?;
    fs::create_dir_all(out.join("samples"))?;
    Ok(())
}

fn report_outcome(out: &Path, outcome: &TrainOutcome) -> Result<()> {
    training::write_records_csv(&out.join("records.csv"), &outcome.records)?;
    if let Some(reason) = &outcome.aborted {
        println!("training aborted early: {reason}");
    }
    if let (Some(first), Some(last)) = (outcome.first_fd(), outcome.final_fd()) {
        println!("fd: first evaluation {first:.6}, final {last:.6}");
    }
    println!("records written: {}", outcome.records.len());
    Ok(())
}

fn save_samples(out: &Path, images: &[ImageVector], scale: f64, side: usize) -> Result<()> {
    let scaled: Vec<ImageVector> = images
        .iter()
        .map(|img| img.iter().map(|&p| p * scale).collect())
        .collect();
    data::save_images_csv(&out.join("samples").join("samples.csv"), &scaled)?;
    for (i, img) in scaled.iter().take(4).enumerate() {
        data::save_pgm(&out.join("samples").join(format!("sample_{i}.pgm")), img, side)?;
    }
    Ok(())
}

fn train_command(
    preset: Preset,
    out: &Path,
    cfg: TrainConfig,
    data_path: Option<&Path>,
) -> Result<()> {
    prepare_out_dir(out)?;
    match preset {
        Preset::BarPatch => {
            let (mut config, mut disc) = bar_patch_preset(cfg.seed)?;
            write_json(&out.join("config.json"), &RunManifest { preset, train: &cfg, model: &config })?;
            let real = bar_training_set(cfg.seed)?;
            let outcome = training::train_patch_gan(&mut config, &mut disc, &real, &cfg)?;
            write_json(&out.join("checkpoints").join("generator.json"), &config)?;
            write_json(&out.join("checkpoints").join("discriminator.json"), &disc)?;
            let mut r = rng::stream(cfg.seed, 999);
            let samples = qgan::patch_generate_images(&config, 16, ShotMode::Exact, &mut r)?;
            save_samples(out, &samples, cfg.scale, 2)?;
            report_outcome(out, &outcome)
        }
        Preset::BarBatch => {
            let mut config = bar_batch_preset(cfg.seed)?;
            write_json(&out.join("config.json"), &RunManifest { preset, train: &cfg, model: &config })?;
            let real = bar_training_set(cfg.seed)?;
            let outcome = training::train_batch_gan(&mut config, &real, &cfg)?;
            write_json(&out.join("checkpoints").join("batch_gan.json"), &config)?;
            let mut r = rng::stream(cfg.seed, 999);
            let samples = qgan::batch_generate_images(&config, 16, ShotMode::Exact, &mut r)?;
            save_samples(out, &samples, cfg.scale, 2)?;
            report_outcome(out, &outcome)
        }
        Preset::DigitsPatch => {
            let path = data_path.ok_or_else(|| Error::InvalidConfig("digits preset needs --data".into()))?;
            let (mut config, mut disc) = digits_patch_preset(cfg.seed)?;
            write_json(&out.join("config.json"), &RunManifest { preset, train: &cfg, model: &config })?;
            let real = digits_training_set(path)?;
            let outcome = training::train_patch_gan(&mut config, &mut disc, &real, &cfg)?;
            write_json(&out.join("checkpoints").join("generator.json"), &config)?;
            write_json(&out.join("checkpoints").join("discriminator.json"), &disc)?;
            let mut r = rng::stream(cfg.seed, 999);
            let samples = qgan::patch_generate_images(&config, 16, ShotMode::Exact, &mut r)?;
            save_samples(out, &samples, cfg.scale, 8)?;
            report_outcome(out, &outcome)
        }
        Preset::BarMlp | Preset::BarCnn => {
            let (mut gen, mut disc) = if preset == Preset::BarMlp {
                bar_mlp_preset(cfg.seed)?
            } else {
                bar_cnn_preset(cfg.seed)?
            };
            write_json(&out.join("config.json"), &RunManifest { preset, train: &cfg, model: &gen })?;
            let real = bar_training_set(cfg.seed)?;
            let outcome = training::train_classical_gan(&mut gen, &mut disc, &real, &cfg)?;
            write_json(&out.join("checkpoints").join("generator.json"), &gen)?;
            write_json(&out.join("checkpoints").join("discriminator.json"), &disc)?;
            let mut r = rng::stream(cfg.seed, 999);
            let samples = gen.sample_images(16, &mut r)?;
            save_samples(out, &samples, cfg.scale, 2)?;
            report_outcome(out, &outcome)
        }
        Preset::GaussianMmd => {
            let mmd = MmdConfig {
                seed: cfg.seed,
                iterations: cfg.iterations,
                eval_every: cfg.eval_every,
                shots: cfg.shots,
                ..MmdConfig::default()
            };
            write_json(&out.join("config.json"), &mmd)?;
            let outcome = training::train_mmd_gaussian(&mmd)?;
            let mut file = std::io::BufWriter::new(fs::File::create(out.join("records.csv"))?);
            writeln!(file, "iteration,tv,mmd")?;
            for ((it, tv), (_, loss)) in outcome.tv_trajectory.iter().zip(&outcome.loss_trajectory) {
                writeln!(file, "{it},{tv},{loss}")?;
            }
            drop(file);
            write_json(&out.join("checkpoints").join("params.json"), &outcome.params)?;
            data::save_images_csv(&out.join("samples").join("distribution.csv"), &[outcome.final_probs.clone()])?;
            let final_tv = outcome.tv_trajectory.last().map(|&(_, tv)| tv).unwrap_or(f64::NAN);
            println!("final total-variation distance: {final_tv:.6}");
            Ok(())
        }
    }
}

fn sweep_grid(full: bool) -> (Vec<f64>, Vec<f64>) {
    if full {
        let lrs: Vec<f64> = (1..=50).map(|i| i as f64 * 1e-4).collect();
        let moms = vec![0.5, 0.6, 0.7, 0.8, 0.9];
        (lrs, moms)
    } else {
        (vec![5e-4, 1e-3, 2e-3, 5e-3], vec![0.5, 0.7, 0.9])
    }
}

fn sweep_command(preset: Preset, out: &Path, seed: u64, iterations: usize, full: bool, top: usize) -> Result<()> {
    if !matches!(preset, Preset::BarMlp | Preset::BarCnn) {
        return Err(Error::InvalidConfig("sweep supports the classical bar presets".into()));
    }
    fs::create_dir_all(out.join("checkpoints"))?;
    let real = bar_training_set(seed)?;
    let (lrs, moms) = sweep_grid(full);
    let mut results: Vec<(f64, f64, Option<f64>, ClassicalGenerator)> = Vec::new();
    for &lr in &lrs {
        for &momentum in &moms {
            let (mut gen, mut disc) = if preset == Preset::BarMlp {
                bar_mlp_preset(seed)?
            } else {
                bar_cnn_preset(seed)?
            };
            let cfg = TrainConfig {
                iterations,
                lr_gen: lr,
                lr_disc: lr,
                momentum,
                seed,
                ..preset_train_config(preset, seed)
            };
            let outcome = training::train_classical_gan(&mut gen, &mut disc, &real, &cfg)?;
            let fd = if outcome.aborted.is_none() { outcome.final_fd() } else { None };
            results.push((lr, momentum, fd, gen));
        }
    }
    let mut file = std::io::BufWriter::new(fs::File::create(out.join("sweep.csv"))?);
    writeln!(file, "lr,momentum,final_fd")?;
    for (lr, m, fd, _) in &results {
        let fd_s = fd.map(|v| v.to_string()).unwrap_or_default();
        writeln!(file, "{lr},{m},{fd_s}")?;
    }
    drop(file);
    results.sort_by(|a, b| {
        a.2.unwrap_or(f64::INFINITY).total_cmp(&b.2.unwrap_or(f64::INFINITY))
    });
    for (rank, (lr, m, fd, gen)) in results.iter().take(top).enumerate() {
        write_json(&out.join("checkpoints").join(format!("rank_{rank}.json")), gen)?;
        println!(
            "rank {rank}: lr={lr} momentum={m} fd={}",
            fd.map(|v| format!("{v:.6}")).unwrap_or_else(|| "n/a".into())
        );
    }
    Ok(())
}

/// Execute a parsed command.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenData { out, m, n, seed } => {
            let images = data::generate_bar_dataset(&BarDatasetConfig { m, n_examples: n, seed })?;
            if let Some(parent) = out.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            data::save_images_csv(&out, &images)?;
            println!("wrote {} images to {}", images.len(), out.display());
            Ok(())
        }
        Command::Train {
            preset,
            out,
            seed,
            iterations,
            lr_gen,
            lr_disc,
            shots,
            exact,
            eval_every,
            eval_samples,
            record_timing,
            data,
        } => {
            let mut cfg = preset_train_config(preset, seed);
            if let Some(v) = iterations {
                cfg.iterations = v;
            }
            if let Some(v) = lr_gen {
                cfg.lr_gen = v;
            }
            if let Some(v) = lr_disc {
                cfg.lr_disc = v;
            }
            if let Some(v) = eval_every {
                cfg.eval_every = v;
            }
            if let Some(v) = eval_samples {
                cfg.eval_samples = v;
            }
            cfg.shots = if exact { None } else { shots.or(Some(3000)) };
            cfg.record_timing = record_timing;
            train_command(preset, &out, cfg, data.as_deref())
        }
        Command::EvalFd { real, fake, scale } => {
            let a = data::load_images_csv(&real)?;
            let b = data::load_images_csv(&fake)?;
            let scaled_a: Vec<ImageVector> = a.iter().map(|i| i.iter().map(|&p| p * scale).collect()).collect();
            let scaled_b: Vec<ImageVector> = b.iter().map(|i| i.iter().map(|&p| p * scale).collect()).collect();
            let fd = metrics::fd_score(&scaled_a, &scaled_b)?;
            println!("fd: {fd}");
            Ok(())
        }
        Command::Sweep { preset, out, seed, iterations, full, top } => {
            sweep_command(preset, &out, seed, iterations, full, top)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build_with_expected_parameter_counts() {
        let (patch, disc) = bar_patch_preset(1).unwrap();
        assert_eq!(patch.n_params(), 9);
        assert_eq!(disc.n_params(), 97);

        let batch = bar_batch_preset(1).unwrap();
        assert_eq!(batch.gen_params.len(), 9);
        assert_eq!(batch.disc_params.len(), 12);
        assert_eq!(batch.total_qubits(), 4);

        let (digits, ddisc) = digits_patch_preset(1).unwrap();
        assert_eq!(digits.n_params(), 100);
        assert_eq!(digits.image_dim(), 64);
        assert_eq!(ddisc.n_params(), 5217);

        let (mlp, _) = bar_mlp_preset(1).unwrap();
        assert_eq!(mlp.n_params(), 18);
        let (cnn, _) = bar_cnn_preset(1).unwrap();
        assert_eq!(cnn.n_params(), 18);
    }

    #[test]
    fn cli_parses_train_invocation() {
        let cli = Cli::try_parse_from([
            "qgan-lab", "train", "--preset", "bar-patch", "--out", "/tmp/x", "--iterations", "5",
        ])
        .unwrap();
        match cli.command {
            Command::Train { preset, iterations, seed, .. } => {
                assert_eq!(preset, Preset::BarPatch);
                assert_eq!(iterations, Some(5));
                assert_eq!(seed, 7);
            }
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn gen_data_and_eval_fd_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bars.csv");
        execute(Cli {
            command: Command::GenData { out: path.clone(), m: 2, n: 50, seed: 3 },
        })
        .unwrap();
        let images = data::load_images_csv(&path).unwrap();
        assert_eq!(images.len(), 50);
        execute(Cli {
            command: Command::EvalFd { real: path.clone(), fake: path, scale: 1.0 },
        })
        .unwrap();
    }

    #[test]
    fn train_command_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let mut cfg = preset_train_config(Preset::BarMlp, 3);
        cfg.iterations = 2;
        cfg.eval_every = 1;
        cfg.eval_samples = 16;
        train_command(Preset::BarMlp, &out, cfg, None).unwrap();
        assert!(out.join("config.json").is_file());
        assert!(out.join("records.csv").is_file());
        assert!(out.join("checkpoints").join("generator.json").is_file());
        assert!(out.join("samples").join("samples.csv").is_file());
        assert!(out.join("samples").join("sample_0.pgm").is_file());
    }

    #[test]
    fn sweep_rejects_quantum_presets() {
        let dir = tempfile::tempdir().unwrap();
        let err = sweep_command(Preset::BarPatch, dir.path(), 1, 2, false, 2);
        assert!(err.is_err());
    }
}
