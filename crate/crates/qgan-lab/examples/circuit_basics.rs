//! State-vector and circuit fundamentals: build a layered rotation/CZ
//! circuit, run it on a latent state, and post-select the generator
//! ancilla to obtain a pixel patch.

use qgan_lab::ansatz::{self, LatentSpec, MpqcSpec, ParamMatrix};
use qgan_lab::qgan::{subgen_forward, PatchGeneratorConfig};
use qgan_lab::qsim::StateVector;
use qgan_lab::{rng, Result};

fn main() -> Result<()> {
    // A 3-qubit, 3-layer circuit: one RY rotation per qubit per layer,
    // chained CZ entanglers between layers.
    let mpqc = MpqcSpec::chain(3, 3);
    let mut r = rng::stream(42, 0);
    let params = ParamMatrix::random(&mpqc, &mut r, 0.0, std::f64::consts::PI);
    println!("circuit: {} qubits, {} layers, {} parameters", mpqc.n_qubits, mpqc.n_layers, params.len());

    // Apply it to |000> and inspect the output distribution.
    let mut state = StateVector::zero(3)?;
    ansatz::apply_mpqc(&mut state, &mpqc, &params)?;
    println!("P(z) on |000>: {:?}", round(&state.probabilities()));

    // Latent input: uniform angles in (0, pi), one RY per qubit.
    let latent = LatentSpec::full(3);
    let alpha = latent.sample_angles(&mut r);
    let input = ansatz::prepare_latent_from_angles(&latent, &alpha)?;
    println!("latent angles: {:?}", round(&alpha));

    // Sub-generator forward pass: run the circuit, post-select the ancilla
    // (highest qubit) on |0>, renormalize the data register.
    let config = PatchGeneratorConfig {
        t_subgens: 1,
        n_qubits: 3,
        n_ancilla: 1,
        mpqc,
        latent,
        params: vec![params],
    };
    let out = subgen_forward(&config, 0, &input)?;
    println!("post-selection success probability: {:.4}", out.success_prob);
    println!("pixel patch (sums to 1): {:?}", round(&out.patch));
    Ok(())
}

fn round(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}
