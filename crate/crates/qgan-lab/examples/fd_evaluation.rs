//! Fréchet Distance between sample sets: fit Gaussians to pixel vectors
//! and compare means and covariances, the score used throughout training.

use qgan_lab::data::{generate_bar_dataset, BarDatasetConfig};
use qgan_lab::metrics::{box_stats, fd_score, gaussian_fit};
use qgan_lab::Result;
use rand::Rng as _;

fn main() -> Result<()> {
    let real = generate_bar_dataset(&BarDatasetConfig { m: 2, n_examples: 1000, seed: 1 })?;

    // A disjoint draw from the same distribution scores near zero.
    let same = generate_bar_dataset(&BarDatasetConfig { m: 2, n_examples: 1000, seed: 2 })?;
    println!("FD(real, fresh draw of real) = {:.5}", fd_score(&real, &same)?);

    // Uniform noise images score far higher.
    let mut r = qgan_lab::rng::stream(3, 0);
    let noise: Vec<Vec<f64>> = (0..1000)
        .map(|_| {
            let raw: Vec<f64> = (0..4).map(|_| r.gen_range(0.0..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / sum).collect()
        })
        .collect();
    println!("FD(real, uniform noise)     = {:.5}", fd_score(&real, &noise)?);

    let (mean, cov) = gaussian_fit(&real)?;
    println!("\nfitted pixel means: {:?}", mean.iter().map(|m| (m * 1e3).round() / 1e3).collect::<Vec<_>>());
    println!("fitted covariance diagonal: {:?}", (0..4).map(|i| (cov[(i, i)] * 1e5).round() / 1e5).collect::<Vec<_>>());

    // Box statistics summarize per-seed score distributions in sweeps.
    let scores: Vec<f64> = (0..20)
        .map(|s| {
            let draw = generate_bar_dataset(&BarDatasetConfig { m: 2, n_examples: 200, seed: 100 + s }).unwrap();
            fd_score(&real, &draw).unwrap()
        })
        .collect();
    let stats = box_stats(&scores)?;
    println!("\nFD over 20 fresh draws: median {:.4}, quartiles [{:.4}, {:.4}]", stats.median, stats.q1, stats.q3);
    Ok(())
}
