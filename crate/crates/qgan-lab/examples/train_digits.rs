//! Train the four-sub-generator patch GAN on 8x8 handwritten-digit images
//! and export generated samples as PGM files.
//!
//! Pass a shorter iteration count as the first argument for a quick look,
//! e.g. `cargo run --release --example train_digits -- 50`.

use qgan_lab::ansatz::ShotMode;
use qgan_lab::cli::{digits_patch_preset, digits_training_set, preset_train_config, Preset};
use qgan_lab::data::save_pgm;
use qgan_lab::qgan::patch_generate_images;
use qgan_lab::training::train_patch_gan;
use qgan_lab::{rng, Result};

fn main() -> Result<()> {
    let iterations: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("iteration count"))
        .unwrap_or(350);
    let seed = 1;
    let (mut config, mut disc) = digits_patch_preset(seed)?;
    let data_path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/optdigits-sample.txt");
    let real = digits_training_set(&data_path)?;
    println!(
        "{} training digits; generator {} parameters over {} sub-generators; discriminator {} parameters",
        real.len(),
        config.n_params(),
        config.t_subgens,
        disc.n_params()
    );

    let cfg = qgan_lab::training::TrainConfig {
        iterations,
        ..preset_train_config(Preset::DigitsPatch, seed)
    };
    let out = train_patch_gan(&mut config, &mut disc, &real, &cfg)?;
    if let Some(msg) = &out.aborted {
        println!("training aborted early: {msg}");
    }
    println!("{:>6} {:>10} {:>8} {:>8}", "iter", "disc loss", "D(fake)", "FD");
    for rec in out.records.iter().filter(|r| r.fd.is_some()) {
        println!(
            "{:>6} {:>10.4} {:>8.4} {:>8.4}",
            rec.iteration, rec.disc_loss, rec.d_fake_mean, rec.fd.unwrap()
        );
    }

    let dir = std::env::temp_dir().join("qgan-lab-digits");
    std::fs::create_dir_all(&dir)?;
    let mut r = rng::stream(99, seed);
    let images = patch_generate_images(&config, 16, ShotMode::Exact, &mut r)?;
    for (i, img) in images.iter().enumerate() {
        save_pgm(&dir.join(format!("digit_{i:02}.pgm")), img, 8)?;
    }
    println!("wrote 16 generated images to {}", dir.display());
    Ok(())
}
