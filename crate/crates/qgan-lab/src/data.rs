//! Dataset construction and ingestion: gray-scale bars, optdigits 8x8
//! images, and amplitude encoding into simulator states.
//!
//! Pixel layout is row-major: a flat image stores x_00, x_01, ..,
//! x_{m-1,m-1}. A gray-scale bar image is a single bright bar in the first
//! column: for m = 2 the four pixels are [a, 0, 1-a, 0] with
//! a ~ unif(0.4, 0.6), so every image is itself a probability vector.

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::qgan::BatchGanConfig;
use crate::qsim::StateVector;

/// Flat nonnegative pixel vector; one image.
pub type ImageVector = Vec<f64>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BarDatasetConfig {
    /// Image side; experiments use m = 2.
    pub m: usize,
    /// Example count; the reference setting is 1000.
    pub n_examples: usize,
    pub seed: u64,
}

impl BarDatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidConfig("bar image side must be >= 2".into()));
        }
        if self.n_examples < 1 {
            return Err(Error::InvalidConfig("need at least one example".into()));
        }
        Ok(())
    }
}

/// Generate the gray-scale bar dataset: a bar in the first column whose top
/// pixel is unif(0.4, 0.6) and whose second pixel is the complement; all
/// remaining pixels are zero. Every image sums to 1, so it is directly a
/// probability vector over pixels — the target space of probability-vector
/// generators — and is preparable by a single layer of RY rotations.
pub fn generate_bar_dataset(config: &BarDatasetConfig) -> Result<Vec<ImageVector>> {
    config.validate()?;
    let mut rng = crate::rng::stream(config.seed, 0);
    let mut images = Vec::with_capacity(config.n_examples);
    for _ in 0..config.n_examples {
        let mut img = vec![0.0; config.m * config.m];
        let a = rng.gen_range(0.4..0.6);
        img[0] = a;
        img[config.m] = 1.0 - a;
        images.push(img);
    }
    Ok(images)
}

/// Divide every pixel by `factor` (used to map bar images, which sum to m,
/// onto the per-image probability simplex).
pub fn normalize_images(images: &[ImageVector], factor: f64) -> Vec<ImageVector> {
    images
        .iter()
        .map(|img| img.iter().map(|p| p / factor).collect())
        .collect()
}

#[derive(Clone, Debug)]
pub struct DigitDataset {
    pub images: Vec<ImageVector>,
    pub labels: Vec<u8>,
}

/// Parse the UCI optdigits text format: 64 comma-separated integers in
/// 0..=16 plus a class label per line. Pixels are scaled by 1/16. Only the
/// requested classes are retained.
pub fn load_optdigits(path: &Path, classes: &[u8]) -> Result<DigitDataset> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 65 {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: line_no + 1,
                message: format!("expected 65 comma-separated fields, got {}", fields.len()),
            });
        }
        let mut pixels = Vec::with_capacity(64);
        for (i, field) in fields[..64].iter().enumerate() {
            let v: i64 = field.trim().parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                line: line_no + 1,
                message: format!("field {i} is not an integer: {field:?}"),
            })?;
            if !(0..=16).contains(&v) {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: line_no + 1,
                    message: format!("pixel value {v} outside 0..=16"),
                });
            }
            pixels.push(v as f64 / 16.0);
        }
        let label: u8 = fields[64].trim().parse().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            line: line_no + 1,
            message: format!("bad class label {:?}", fields[64]),
        })?;
        if classes.is_empty() || classes.contains(&label) {
            images.push(pixels);
            labels.push(label);
        }
    }
    if images.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no examples with classes {classes:?} in {}",
            path.display()
        )));
    }
    Ok(DigitDataset { images, labels })
}

/// Encode a nonnegative image as amplitudes sqrt(pixel_j / sum), zero-padded
/// to 2^n_qubits. The measurement distribution of the result reproduces the
/// l1-normalized image.
pub fn amplitude_encode(image: &[f64], n_qubits: usize) -> Result<StateVector> {
    let dim = 1usize << n_qubits;
    if image.len() > dim {
        return Err(Error::DimensionMismatch {
            context: format!("image of length {} does not fit {} qubits", image.len(), n_qubits),
        });
    }
    if image.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidConfig("amplitude encoding needs nonnegative pixels".into()));
    }
    let total: f64 = image.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidConfig("cannot amplitude-encode an all-zero image".into()));
    }
    let mut amps = vec![Complex64::ZERO; dim];
    for (j, &p) in image.iter().enumerate() {
        amps[j] = Complex64::new((p / total).sqrt(), 0.0);
    }
    StateVector::from_amplitudes(n_qubits, amps)
}

/// Encode 2^{N_I} images into the index-feature entangled batch state
/// 2^{-N_I/2} sum_i |i>_I |x_i>_D |0>_anc, following the batch GAN's qubit
/// layout (data qubits lowest, index register highest).
pub fn batch_amplitude_encode(images: &[ImageVector], config: &BatchGanConfig) -> Result<StateVector> {
    config.validate()?;
    let branches = 1usize << config.n_index;
    if images.len() != branches {
        return Err(Error::DimensionMismatch {
            context: format!("{} images for 2^{} index branches", images.len(), config.n_index),
        });
    }
    let n_total = config.total_qubits();
    let feature_dim = 1usize << (n_total - config.n_index);
    let data_dim = 1usize << config.n_data;
    let branch_weight = 1.0 / (branches as f64).sqrt();
    let mut amps = vec![Complex64::ZERO; 1 << n_total];
    for (i, image) in images.iter().enumerate() {
        let encoded = amplitude_encode(image, config.n_data)?;
        for (j, amp) in encoded.amplitudes().iter().enumerate().take(data_dim) {
            // Ancilla qubits sit between data and index and stay |0>.
            amps[i * feature_dim + j] = amp * branch_weight;
        }
    }
    StateVector::from_amplitudes(n_total, amps)
}

/// Write one image per line, comma-separated.
pub fn save_images_csv(path: &Path, images: &[ImageVector]) -> Result<()> {
    let mut out = String::new();
    for img in images {
        let fields: Vec<String> = img.iter().map(|p| format!("{p}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn load_images_csv(path: &Path) -> Result<Vec<ImageVector>> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut images = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut img = Vec::new();
        for field in line.trim().split(',') {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                line: line_no + 1,
                message: format!("bad pixel value {field:?}"),
            })?;
            img.push(v);
        }
        images.push(img);
    }
    if images.is_empty() {
        return Err(Error::EmptyInput(path.display().to_string()));
    }
    Ok(images)
}

/// Export a square image as binary 8-bit PGM (P5); pixel = round(255 * value)
/// clamped to [0, 255].
pub fn save_pgm(path: &Path, image: &[f64], side: usize) -> Result<()> {
    if image.len() != side * side {
        return Err(Error::DimensionMismatch {
            context: format!("{} pixels for a {side}x{side} PGM", image.len()),
        });
    }
    let mut file = std::fs::File::create(path)?;
    write!(file, "P5\n{side} {side}\n255\n")?;
    let bytes: Vec<u8> = image
        .iter()
        .map(|&p| (p * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    file.write_all(&bytes)?;
    Ok(())
}
