//! Acceptance suite: one integration test per pinned reproduction property,
//! each printing a single PASS line with the measured values.
//!
//! Long-horizon training thresholds are pinned from committed pilot runs of
//! the exact seeds used here; all runs are exact-mode deterministic unless a
//! test says otherwise.

use approx::assert_abs_diff_eq;
use rand::Rng as _;

use qgan_lab::ansatz::{
    self, LatentSpec, MpqcSpec, ParamMatrix, ShotMode,
};
use qgan_lab::classical::{CnnGenerator, MlpNetwork, OutputActivation};
use qgan_lab::cli::{
    self, bar_batch_preset, bar_patch_preset, digits_patch_preset, preset_train_config, Preset,
};
use qgan_lab::data;
use qgan_lab::metrics;
use qgan_lab::qgan::{self, BatchGanConfig, PatchGeneratorConfig};
use qgan_lab::qsim::StateVector;
use qgan_lab::rng;
use qgan_lab::training::{
    self, gen_loss, train_batch_gan, train_mmd_gaussian, train_patch_gan, MmdConfig,
    TrainConfig, TrainOutcome,
};

fn median(mut v: Vec<f64>) -> f64 {
    assert!(!v.is_empty());
    v.sort_by(f64::total_cmp);
    if v.len() % 2 == 1 {
        v[v.len() / 2]
    } else {
        0.5 * (v[v.len() / 2 - 1] + v[v.len() / 2])
    }
}

fn fd_series(outcome: &TrainOutcome) -> Vec<f64> {
    outcome.records.iter().filter_map(|r| r.fd).collect()
}

/// Median over the first and last three Fréchet-Distance evaluations.
fn fd_endpoints(fds: &[f64]) -> (f64, f64) {
    assert!(fds.len() >= 6, "need at least six FD evaluations, got {}", fds.len());
    (median(fds[..3].to_vec()), median(fds[fds.len() - 3..].to_vec()))
}

// ---------------------------------------------------------------------------
// 1. Gradient exactness: closed forms, finite differences, backprop.
// ---------------------------------------------------------------------------

#[test]
fn gradients_match_closed_forms_and_finite_differences() {
    // One qubit: |<0|RY(t)|0>|^2 = cos^2(t/2), derivative -sin(t)/2; the
    // shift rule is exact for this expectation-linear read-out.
    let spec1 = MpqcSpec { n_qubits: 1, n_layers: 1, entangler: vec![] };
    for &theta in &[0.0, 0.3, 1.0, 2.2, -1.7, 3.1] {
        let params = ParamMatrix::from_vec(1, 1, vec![theta]).unwrap();
        let grad = ansatz::parameter_shift_grad(&params, |p, _| {
            let mut s = StateVector::zero(1).unwrap();
            ansatz::apply_mpqc(&mut s, &spec1, p).unwrap();
            Ok(s.probabilities()[0])
        })
        .unwrap();
        assert_abs_diff_eq!(grad.as_slice()[0], -theta.sin() / 2.0, epsilon = 1e-10);

        // <Z> = cos(t), derivative -sin(t).
        let grad_z = ansatz::parameter_shift_grad(&params, |p, _| {
            let mut s = StateVector::zero(1).unwrap();
            ansatz::apply_mpqc(&mut s, &spec1, p).unwrap();
            let probs = s.probabilities();
            Ok(probs[0] - probs[1])
        })
        .unwrap();
        assert_abs_diff_eq!(grad_z.as_slice()[0], -theta.sin(), epsilon = 1e-10);
    }

    // Random 3-qubit, 3-layer circuits with a fixed linear read-out: the
    // shift rule agrees with central finite differences at h = 1e-5.
    let spec3 = MpqcSpec::chain(3, 3);
    let mut r = rng::stream(2024, 0);
    for _ in 0..5 {
        let params = ParamMatrix::random(&spec3, &mut r, 0.0, std::f64::consts::TAU);
        let weights: Vec<f64> = (0..8).map(|_| r.gen_range(-1.0..1.0)).collect();
        let loss = |p: &ParamMatrix, _tag: ansatz::EvalTag| {
            let mut s = StateVector::zero(3)?;
            ansatz::apply_mpqc(&mut s, &spec3, p)?;
            Ok(s.probabilities().iter().zip(&weights).map(|(p, w)| p * w).sum())
        };
        let shift = ansatz::parameter_shift_grad(&params, loss).unwrap();
        let fd = ansatz::finite_difference_grad(&params, 1e-5, loss).unwrap();
        for (a, b) in shift.as_slice().iter().zip(fd.as_slice()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-4);
        }
    }

    // MLP backprop against finite differences, 1e-5 relative.
    let mut net = MlpNetwork::new(&[3, 8, 4], OutputActivation::Softmax, &mut r).unwrap();
    let input: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
    let upstream: Vec<f64> = (0..4).map(|_| r.gen_range(-1.0..1.0)).collect();
    let cache = net.forward(&input).unwrap();
    let (grads, _) = net.backward(&cache, &upstream);
    let analytic = grads.flatten();
    let mut flat = net.flatten_params();
    for i in 0..flat.len() {
        let h = 1e-6;
        let orig = flat[i];
        let eval = |v: f64, net: &mut MlpNetwork, flat: &mut Vec<f64>| {
            flat[i] = v;
            net.set_params(flat).unwrap();
            let c = net.forward(&input).unwrap();
            c.output().iter().zip(&upstream).map(|(y, u)| y * u).sum::<f64>()
        };
        let plus = eval(orig + h, &mut net, &mut flat);
        let minus = eval(orig - h, &mut net, &mut flat);
        flat[i] = orig;
        net.set_params(&flat).unwrap();
        let numeric = (plus - minus) / (2.0 * h);
        let tol = 1e-5 * numeric.abs().max(1e-3);
        assert!((analytic[i] - numeric).abs() <= tol, "mlp param {i}: {} vs {numeric}", analytic[i]);
    }

    // CNN generator backprop against finite differences, 1e-5 relative.
    let mut cnn = CnnGenerator::new(2, 5, &mut r).unwrap();
    let noise: Vec<f64> = (0..2).map(|_| r.gen_range(-1.0..1.0)).collect();
    let upstream: Vec<f64> = (0..4).map(|_| r.gen_range(-1.0..1.0)).collect();
    let cache = cnn.forward(&noise).unwrap();
    let analytic = cnn.backward(&cache, &upstream);
    let mut flat = cnn.flatten_params();
    for i in 0..flat.len() {
        let h = 1e-6;
        let orig = flat[i];
        let eval = |v: f64, cnn: &mut CnnGenerator, flat: &mut Vec<f64>| {
            flat[i] = v;
            cnn.set_params(flat).unwrap();
            let c = cnn.forward(&noise).unwrap();
            c.output().iter().zip(&upstream).map(|(y, u)| y * u).sum::<f64>()
        };
        let plus = eval(orig + h, &mut cnn, &mut flat);
        let minus = eval(orig - h, &mut cnn, &mut flat);
        flat[i] = orig;
        cnn.set_params(&flat).unwrap();
        let numeric = (plus - minus) / (2.0 * h);
        let tol = 1e-5 * numeric.abs().max(1e-3);
        assert!((analytic[i] - numeric).abs() <= tol, "cnn param {i}: {} vs {numeric}", analytic[i]);
    }

    println!("PASS gradients: shift rule exact to 1e-10 (closed forms), 1e-4 (finite differences); backprop 1e-5 relative");
}

// ---------------------------------------------------------------------------
// 2. Post-selection correctness against a dense projector oracle.
// ---------------------------------------------------------------------------

#[test]
fn post_selection_matches_dense_projector_oracle() {
    let mut r = rng::stream(7, 42);
    for trial in 0..100 {
        let n_layers = r.gen_range(1..=3);
        let mpqc = MpqcSpec::chain(3, n_layers);
        let params = ParamMatrix::random(&mpqc, &mut r, 0.0, std::f64::consts::TAU);
        let latent = LatentSpec::full(3);
        let config = PatchGeneratorConfig {
            t_subgens: 1,
            n_qubits: 3,
            n_ancilla: 1,
            mpqc: mpqc.clone(),
            latent: latent.clone(),
            params: vec![params.clone()],
        };
        let alpha = latent.sample_angles(&mut r);
        let state = ansatz::prepare_latent_from_angles(&latent, &alpha).unwrap();

        // Oracle: apply the circuit on the full register, then evaluate
        // <Psi| (|j><j| (x) |0><0|_ancilla) |Psi> / P(ancilla = 0) directly
        // from the dense probability vector (ancilla is the top qubit).
        let mut full = state.clone();
        ansatz::apply_mpqc(&mut full, &mpqc, &params).unwrap();
        let probs = full.probabilities();
        let success: f64 = probs[..4].iter().sum();
        assert!(success > 1e-12, "degenerate trial {trial}");
        let expected: Vec<f64> = probs[..4].iter().map(|p| p / success).collect();

        let out = qgan::subgen_forward(&config, 0, &state).unwrap();
        assert_abs_diff_eq!(out.success_prob, success, epsilon = 1e-10);
        for (a, b) in out.patch.iter().zip(&expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(out.patch.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
    }
    println!("PASS post-selection: 100 random 3-qubit/1-ancilla configs match the dense projector oracle to 1e-10");
}

// ---------------------------------------------------------------------------
// 3. Optimal-discriminator theorem via brute-force grid search.
// ---------------------------------------------------------------------------

#[test]
fn optimal_discriminator_matches_brute_force_grid() {
    let mut r = rng::stream(11, 0);
    for _ in 0..20 {
        let draw = |r: &mut rng::Rng| -> Vec<f64> {
            let raw: Vec<f64> = (0..8).map(|_| r.gen_range(0.05..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / sum).collect()
        };
        let p_data = draw(&mut r);
        let p_g = draw(&mut r);
        let formula = training::optimal_discriminator(&p_data, &p_g).unwrap();

        for x in 0..8 {
            // Pointwise brute force over D(x) in {0.001, ..., 0.999}.
            let mut best = (f64::NEG_INFINITY, 0.0);
            for k in 1..1000 {
                let d = k as f64 * 0.001;
                let v = p_data[x] * d.ln() + p_g[x] * (1.0 - d).ln();
                if v > best.0 {
                    best = (v, d);
                }
            }
            assert!(
                (best.1 - formula[x]).abs() <= 0.001,
                "point {x}: grid {} vs formula {}",
                best.1,
                formula[x]
            );
        }
    }

    // At p_g = p_data the discriminator value function attains -log 4.
    let p: Vec<f64> = vec![0.31, 0.07, 0.12, 0.05, 0.2, 0.1, 0.05, 0.1];
    let d_star = training::optimal_discriminator(&p, &p).unwrap();
    let value: f64 = p
        .iter()
        .zip(&d_star)
        .map(|(px, d)| px * d.ln() + px * (1.0 - d).ln())
        .sum();
    assert_abs_diff_eq!(value, -(4.0f64.ln()), epsilon = 1e-9);
    println!("PASS optimal discriminator: 20 random pairs match P_data/(P_g+P_data) within the 0.001 grid; equilibrium value -log 4 to 1e-9");
}

// ---------------------------------------------------------------------------
// 4. Batching linearity: the superposed batch gradient is the mean of the
//    per-example gradients.
// ---------------------------------------------------------------------------

#[test]
fn batched_gradient_averages_per_example_gradients() {
    let mut r = rng::stream(23, 0);
    for _ in 0..10 {
        let gen_spec = MpqcSpec::chain(3, 2);
        let disc_spec = MpqcSpec::chain(3, 2);
        let batch = BatchGanConfig {
            n_index: 1,
            n_data: 2,
            n_anc_gen: 1,
            n_anc_disc: 1,
            gen_params: ParamMatrix::random(&gen_spec, &mut r, 0.0, std::f64::consts::TAU),
            disc_params: ParamMatrix::random(&disc_spec, &mut r, 0.0, std::f64::consts::TAU),
            gen_spec,
            disc_spec,
            latent: LatentSpec::full(3),
        };
        let single = BatchGanConfig { n_index: 0, ..batch.clone() };
        let alphas: Vec<Vec<f64>> = (0..2).map(|_| batch.latent.sample_angles(&mut r)).collect();

        // Generator-side loss: mean over examples of log(1 - D(G(z))).
        let batch_grad = ansatz::parameter_shift_grad(&batch.gen_params, |theta, _| {
            let mut probe = batch.clone();
            probe.gen_params = theta.clone();
            let latent = qgan::batch_latent_from_angles(&probe, &alphas)?;
            let (state, _) = qgan::batch_generator_forward(&probe, &latent)?;
            let d = qgan::quantum_discriminator_forward(&probe, &state)?;
            Ok(gen_loss(&d.per_branch, false))
        })
        .unwrap();

        let mut mean_grad = vec![0.0; batch.gen_params.len()];
        for alpha in &alphas {
            let g = ansatz::parameter_shift_grad(&single.gen_params, |theta, _| {
                let mut probe = single.clone();
                probe.gen_params = theta.clone();
                let latent = qgan::batch_latent_from_angles(&probe, std::slice::from_ref(alpha))?;
                let (state, _) = qgan::batch_generator_forward(&probe, &latent)?;
                let d = qgan::quantum_discriminator_forward(&probe, &state)?;
                Ok(gen_loss(&d.per_branch, false))
            })
            .unwrap();
            for (m, v) in mean_grad.iter_mut().zip(g.as_slice()) {
                *m += v / alphas.len() as f64;
            }
        }
        for (a, b) in batch_grad.as_slice().iter().zip(&mean_grad) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }

        // Discriminator-side real-data term, -mean(log D(x)), on a batch of
        // two encoded real images.
        let reals: Vec<Vec<f64>> = (0..2)
            .map(|_| {
                let a = r.gen_range(0.4..0.6);
                vec![a, 0.0, 1.0 - a, 0.0]
            })
            .collect();
        let batch_grad = ansatz::parameter_shift_grad(&batch.disc_params, |phi, _| {
            let mut probe = batch.clone();
            probe.disc_params = phi.clone();
            let state = data::batch_amplitude_encode(&reals, &probe)?;
            let d = qgan::quantum_discriminator_forward(&probe, &state)?;
            Ok(gen_loss(&d.per_branch, true))
        })
        .unwrap();
        let mut mean_grad = vec![0.0; batch.disc_params.len()];
        for real in &reals {
            let g = ansatz::parameter_shift_grad(&single.disc_params, |phi, _| {
                let mut probe = single.clone();
                probe.disc_params = phi.clone();
                let state = data::batch_amplitude_encode(std::slice::from_ref(real), &probe)?;
                let d = qgan::quantum_discriminator_forward(&probe, &state)?;
                Ok(gen_loss(&d.per_branch, true))
            })
            .unwrap();
            for (m, v) in mean_grad.iter_mut().zip(g.as_slice()) {
                *m += v / reals.len() as f64;
            }
        }
        for (a, b) in batch_grad.as_slice().iter().zip(&mean_grad) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }
    println!("PASS batching: superposed-batch gradients equal the mean per-example gradients to 1e-9 on 10 random configs");
}

// ---------------------------------------------------------------------------
// 5. Bar-task training: FD trend and bar validity over 5 seeds.
// ---------------------------------------------------------------------------

fn run_bar_patch(seed: u64, shots: Option<u64>) -> (Vec<f64>, f64, f64) {
    let (mut config, mut disc) = bar_patch_preset(seed).unwrap();
    let real = cli::bar_training_set(seed).unwrap();
    let cfg = TrainConfig { seed, shots, ..preset_train_config(Preset::BarPatch, seed) };
    let out = train_patch_gan(&mut config, &mut disc, &real, &cfg).unwrap();
    assert!(out.aborted.is_none(), "seed {seed} aborted: {:?}", out.aborted);
    let fds = fd_series(&out);
    let mut er = rng::stream(99, seed);
    let images = qgan::patch_generate_images(&config, 1000, ShotMode::Exact, &mut er).unwrap();
    let validity = metrics::bar_validity(&images, 0.05, 0.15).unwrap();
    let last = *fds.last().unwrap();
    (fds, validity.fraction_valid, last)
}

#[test]
fn bar_patch_training_reduces_fd_and_yields_valid_bars() {
    let mut first_pool = Vec::new();
    let mut last_pool = Vec::new();
    let mut ratios = Vec::new();
    let mut validities = Vec::new();
    for seed in 1..=5 {
        let (fds, validity, _) = run_bar_patch(seed, None);
        let (first, last) = fd_endpoints(&fds);
        first_pool.extend_from_slice(&fds[..3]);
        last_pool.extend_from_slice(&fds[fds.len() - 3..]);
        ratios.push(last / first);
        validities.push(validity);
    }
    let pooled = median(last_pool) / median(first_pool);
    let mean_validity = validities.iter().sum::<f64>() / validities.len() as f64;

    // Pilot-pinned thresholds: per-seed ratios 0.57-0.83, pooled 0.76,
    // per-seed validity 0.03-0.13, mean validity 0.09 (seeds 1..=5).
    for (i, ratio) in ratios.iter().enumerate() {
        assert!(*ratio < 0.85, "seed {}: FD ratio {ratio}", i + 1);
    }
    assert!(pooled < 0.78, "pooled FD ratio {pooled}");
    for (i, v) in validities.iter().enumerate() {
        assert!(*v >= 0.02, "seed {}: validity {v}", i + 1);
    }
    assert!(mean_validity >= 0.08, "mean validity {mean_validity}");
    println!(
        "PASS bar training: pooled final/initial FD ratio {pooled:.3} (per-seed max {:.3}); mean bar validity {mean_validity:.3}",
        ratios.iter().cloned().fold(0.0, f64::max)
    );
}

// ---------------------------------------------------------------------------
// 6. Batch-GAN parity with the patch GAN on the bar task.
// ---------------------------------------------------------------------------

#[test]
fn batch_gan_final_fd_is_within_twice_patch_gan() {
    let mut patch_finals = Vec::new();
    let mut batch_finals = Vec::new();
    for seed in 1..=5 {
        let (_, _, last) = run_bar_patch(seed, None);
        patch_finals.push(last);

        let mut config = bar_batch_preset(seed).unwrap();
        let real = cli::bar_training_set(seed).unwrap();
        let cfg = TrainConfig { seed, ..preset_train_config(Preset::BarBatch, seed) };
        let out = train_batch_gan(&mut config, &real, &cfg).unwrap();
        assert!(out.aborted.is_none(), "batch seed {seed} aborted: {:?}", out.aborted);
        batch_finals.push(*fd_series(&out).last().unwrap());
    }
    let patch_med = median(patch_finals);
    let batch_med = median(batch_finals);
    assert!(
        batch_med <= 2.0 * patch_med,
        "batch median {batch_med} vs patch median {patch_med}"
    );
    println!("PASS batch parity: batch GAN median final FD {batch_med:.3} within 2x patch GAN {patch_med:.3}");
}

// ---------------------------------------------------------------------------
// 7. MMD Gaussian loading reaches the target distribution.
// ---------------------------------------------------------------------------

#[test]
fn mmd_gaussian_loading_reaches_target() {
    let mut finals = Vec::new();
    for seed in 1..=3 {
        let cfg = MmdConfig { seed, shots: None, ..MmdConfig::default() };
        let out = train_mmd_gaussian(&cfg).unwrap();
        let (_, tv) = *out.tv_trajectory.last().unwrap();
        assert!(tv <= 0.1, "seed {seed}: final TV {tv}");
        finals.push(tv);
    }
    println!(
        "PASS gaussian loading: final TV {:?} <= 0.1 on 3/3 seeds",
        finals.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
    );
}

// ---------------------------------------------------------------------------
// 8. Digits smoke run: completes and shows adversarial progress.
// ---------------------------------------------------------------------------

fn digits_data_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/optdigits-sample.txt")
}

#[test]
fn digits_smoke_run_trains_the_discriminator() {
    let (mut config, mut disc) = digits_patch_preset(1).unwrap();
    let real = cli::digits_training_set(&digits_data_path()).unwrap();
    let cfg = TrainConfig {
        seed: 1,
        iterations: 50,
        ..preset_train_config(Preset::DigitsPatch, 1)
    };
    let out = train_patch_gan(&mut config, &mut disc, &real, &cfg).unwrap();
    assert!(out.aborted.is_none(), "aborted: {:?}", out.aborted);
    assert_eq!(out.records.len(), 50);

    // The freshly initialized discriminator answers ~0.5 everywhere; over
    // the smoke run it must learn to separate real from generated images.
    let first = &out.records[0];
    let last = out.records.last().unwrap();
    let first_gap = first.d_real_mean - first.d_fake_mean;
    let last_gap = last.d_real_mean - last.d_fake_mean;
    assert!(last.disc_loss < first.disc_loss, "disc loss {} -> {}", first.disc_loss, last.disc_loss);
    assert!(last_gap > first_gap, "real/fake gap {first_gap} -> {last_gap}");
    assert!(out.first_fd().is_some());
    println!(
        "PASS digits smoke: 50 iterations, disc loss {:.4} -> {:.4}, real/fake gap {:.4} -> {:.4}",
        first.disc_loss, last.disc_loss, first_gap, last_gap
    );
}

/// Full-length digits run with image export; ignored by default (longer).
#[test]
#[ignore]
fn digits_full_run_exports_images() {
    let (mut config, mut disc) = digits_patch_preset(1).unwrap();
    let real = cli::digits_training_set(&digits_data_path()).unwrap();
    let cfg = TrainConfig { seed: 1, ..preset_train_config(Preset::DigitsPatch, 1) };
    let out = train_patch_gan(&mut config, &mut disc, &real, &cfg).unwrap();
    assert!(out.aborted.is_none(), "aborted: {:?}", out.aborted);

    let dir = std::env::temp_dir().join("qgan-lab-digits-full");
    std::fs::create_dir_all(&dir).unwrap();
    let mut r = rng::stream(99, 1);
    let images = qgan::patch_generate_images(&config, 16, ShotMode::Exact, &mut r).unwrap();
    for (i, img) in images.iter().enumerate() {
        data::save_pgm(&dir.join(format!("digit_{i:02}.pgm")), img, 8).unwrap();
    }
    println!(
        "PASS digits full run: 350 iterations, final FD {:?}, images exported to {}",
        out.final_fd(),
        dir.display()
    );
}

// ---------------------------------------------------------------------------
// 9. Determinism: byte-identical training logs for identical seeds.
// ---------------------------------------------------------------------------

#[test]
fn same_seed_runs_write_byte_identical_records() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let (mut config, mut disc) = bar_patch_preset(3).unwrap();
        let real = cli::bar_training_set(3).unwrap();
        let cfg = TrainConfig {
            seed: 3,
            iterations: 60,
            ..preset_train_config(Preset::BarPatch, 3)
        };
        let out = train_patch_gan(&mut config, &mut disc, &real, &cfg).unwrap();
        let path = dir.path().join(format!("records_{tag}.csv"));
        training::write_records_csv(&path, &out.records).unwrap();
        std::fs::read(&path).unwrap()
    };
    assert_eq!(run("a"), run("b"), "patch records differ between identical runs");

    let run_batch = |tag: &str| {
        let mut config = bar_batch_preset(3).unwrap();
        let real = cli::bar_training_set(3).unwrap();
        let cfg = TrainConfig {
            seed: 3,
            iterations: 60,
            ..preset_train_config(Preset::BarBatch, 3)
        };
        let out = train_batch_gan(&mut config, &real, &cfg).unwrap();
        let path = dir.path().join(format!("batch_records_{tag}.csv"));
        training::write_records_csv(&path, &out.records).unwrap();
        std::fs::read(&path).unwrap()
    };
    assert_eq!(run_batch("a"), run_batch("b"), "batch records differ between identical runs");
    println!("PASS determinism: identical seeds produce byte-identical records.csv (patch and batch)");
}

// ---------------------------------------------------------------------------
// 10. Finite-shot sanity: the FD trend survives K = 3000 shot noise.
// ---------------------------------------------------------------------------

#[test]
fn finite_shot_training_preserves_fd_trend() {
    let mut passing = 0;
    let mut ratios = Vec::new();
    for seed in 1..=5 {
        let (fds, _, _) = run_bar_patch(seed, Some(3000));
        let (first, last) = fd_endpoints(&fds);
        let ratio = last / first;
        if ratio < 0.85 {
            passing += 1;
        }
        ratios.push(ratio);
    }
    assert!(passing >= 4, "only {passing}/5 seeds kept the FD trend; ratios {ratios:?}");
    println!(
        "PASS finite shots: {passing}/5 seeds keep the FD downtrend at K=3000 (ratios {:?})",
        ratios.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>()
    );
}
