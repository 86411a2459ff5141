//! Train the fully quantum batch GAN (quantum generator and quantum
//! discriminator sharing one register) on the 2x2 bar task.

use qgan_lab::ansatz::ShotMode;
use qgan_lab::cli::{bar_batch_preset, bar_training_set, preset_train_config, Preset};
use qgan_lab::qgan::batch_generate_images;
use qgan_lab::training::train_batch_gan;
use qgan_lab::{rng, Result};

fn main() -> Result<()> {
    let seed = 1;
    let mut config = bar_batch_preset(seed)?;
    let real = bar_training_set(seed)?;
    let cfg = preset_train_config(Preset::BarBatch, seed);
    println!(
        "register: {} qubits total ({} data, {} generator ancilla, {} discriminator ancilla, {} index)",
        config.total_qubits(),
        config.n_data,
        config.n_anc_gen,
        config.n_anc_disc,
        config.n_index
    );

    let out = train_batch_gan(&mut config, &real, &cfg)?;
    if let Some(msg) = &out.aborted {
        println!("training aborted early: {msg}");
    }
    println!("{:>6} {:>10} {:>10} {:>8}", "iter", "disc loss", "gen loss", "FD");
    for rec in out.records.iter().filter(|r| r.fd.is_some()) {
        println!(
            "{:>6} {:>10.4} {:>10.4} {:>8.4}",
            rec.iteration, rec.disc_loss, rec.gen_loss, rec.fd.unwrap()
        );
    }

    let mut r = rng::stream(99, seed);
    let images = batch_generate_images(&config, 5, ShotMode::Exact, &mut r)?;
    println!("sample generated images:");
    for img in &images {
        println!("  {:?}", img.iter().map(|p| (p * 1e3).round() / 1e3).collect::<Vec<_>>());
    }
    Ok(())
}
