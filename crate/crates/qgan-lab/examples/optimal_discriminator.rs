//! The closed-form optimal discriminator D*(x) = P_data(x) / (P_data(x) +
//! P_g(x)) and the -log 4 equilibrium of the minimax value function.

use qgan_lab::training::{discrete_gaussian, optimal_discriminator};
use qgan_lab::Result;

fn main() -> Result<()> {
    // Two nearby discrete Gaussians as data and generator distributions.
    let p_data = discrete_gaussian(8, 3.0, 1.2);
    let p_g = discrete_gaussian(8, 4.2, 1.5);
    let d_star = optimal_discriminator(&p_data, &p_g)?;

    println!("{:>3} {:>9} {:>9} {:>9}", "x", "P_data", "P_g", "D*(x)");
    for x in 0..8 {
        println!("{x:>3} {:>9.4} {:>9.4} {:>9.4}", p_data[x], p_g[x], d_star[x]);
    }

    let value = |p: &[f64], q: &[f64], d: &[f64]| -> f64 {
        p.iter()
            .zip(q)
            .zip(d)
            .map(|((px, qx), dx)| px * dx.ln() + qx * (1.0 - dx).ln())
            .sum()
    };
    println!("\nvalue at D*: {:.6}", value(&p_data, &p_g, &d_star));

    // When the generator matches the data, D* is 1/2 everywhere and the
    // value function reaches its global minimum -log 4.
    let d_eq = optimal_discriminator(&p_data, &p_data)?;
    println!(
        "value at equilibrium (P_g = P_data): {:.6} vs -log 4 = {:.6}",
        value(&p_data, &p_data, &d_eq),
        -(4.0f64.ln())
    );
    Ok(())
}
