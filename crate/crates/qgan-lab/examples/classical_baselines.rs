//! Train the classical MLP and CNN generator baselines on the bar task and
//! compare their Fréchet-Distance trajectories with the quantum patch GAN's
//! parameter budget.

use qgan_lab::cli::{
    bar_cnn_preset, bar_mlp_preset, bar_patch_preset, bar_training_set, preset_train_config,
    Preset,
};
use qgan_lab::training::train_classical_gan;
use qgan_lab::Result;

fn main() -> Result<()> {
    let seed = 1;
    let real = bar_training_set(seed)?;
    let (quantum, _) = bar_patch_preset(seed)?;
    println!("quantum generator parameter budget: {}", quantum.n_params());

    for (name, preset) in [("MLP", Preset::BarMlp), ("CNN", Preset::BarCnn)] {
        let (mut gen, mut disc) = match preset {
            Preset::BarMlp => bar_mlp_preset(seed)?,
            _ => bar_cnn_preset(seed)?,
        };
        println!("\n{name} generator: {} parameters", gen.n_params());
        let cfg = preset_train_config(preset, seed);
        let out = train_classical_gan(&mut gen, &mut disc, &real, &cfg)?;
        println!("{:>6} {:>10} {:>8}", "iter", "disc loss", "FD");
        for rec in out.records.iter().filter(|r| r.fd.is_some()) {
            println!("{:>6} {:>10.4} {:>8.4}", rec.iteration, rec.disc_loss, rec.fd.unwrap());
        }
        println!("{name} FD: {:.4} -> {:.4}", out.first_fd().unwrap(), out.final_fd().unwrap());
    }
    Ok(())
}
