//! Effect of finite measurement shots: train the bar-task patch GAN with
//! sampled read-outs at several shot counts and compare the Fréchet-Distance
//! trend against exact probabilities.

use qgan_lab::cli::{bar_patch_preset, bar_training_set, preset_train_config, Preset};
use qgan_lab::training::{train_patch_gan, TrainConfig};
use qgan_lab::Result;

fn main() -> Result<()> {
    let seed = 1;
    let real = bar_training_set(seed)?;

    for shots in [None, Some(300), Some(3000), Some(30000)] {
        let (mut config, mut disc) = bar_patch_preset(seed)?;
        let cfg = TrainConfig { shots, ..preset_train_config(Preset::BarPatch, seed) };
        let out = train_patch_gan(&mut config, &mut disc, &real, &cfg)?;
        let label = match shots {
            None => "exact".to_string(),
            Some(k) => format!("{k} shots"),
        };
        let first = out.first_fd().unwrap();
        let last = out.final_fd().unwrap();
        println!(
            "{label:>12}: FD {first:.4} -> {last:.4} (ratio {:.3}), min success prob {:.4}",
            last / first,
            out.records
                .iter()
                .map(|r| r.postselect_min_prob)
                .fold(f64::INFINITY, f64::min)
        );
    }
    Ok(())
}
