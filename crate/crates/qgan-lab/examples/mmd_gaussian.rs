//! Load a discretized Gaussian into a 5-qubit circuit by gradient descent
//! on a kernel mean discrepancy, and watch the total-variation distance to
//! the target fall.

use qgan_lab::training::{discrete_gaussian, train_mmd_gaussian, MmdConfig};
use qgan_lab::Result;

fn main() -> Result<()> {
    let cfg = MmdConfig::default();
    println!(
        "target: Gaussian(mean {}, std {}) discretized over 0..{}",
        cfg.target_mean,
        cfg.target_std,
        (1 << cfg.n_qubits) - 1
    );

    let out = train_mmd_gaussian(&cfg)?;
    println!("{:>6} {:>12} {:>10}", "iter", "MMD loss", "TV dist");
    for ((it, tv), (_, loss)) in out.tv_trajectory.iter().zip(&out.loss_trajectory) {
        println!("{it:>6} {loss:>12.3e} {tv:>10.4}");
    }

    // ASCII comparison of the learned and target distributions.
    let target = discrete_gaussian(1 << cfg.n_qubits, cfg.target_mean, cfg.target_std);
    let peak = target.iter().cloned().fold(0.0, f64::max);
    println!("\n  x  learned vs target ('#' learned, '.' target scale)");
    for (x, (&q, &p)) in out.final_probs.iter().zip(&target).enumerate() {
        let bar = |v: f64| "#".repeat((v / peak * 30.0).round() as usize);
        println!("{x:>3}  {:<32} {:.4} (target {:.4})", bar(q), q, p);
    }
    Ok(())
}
