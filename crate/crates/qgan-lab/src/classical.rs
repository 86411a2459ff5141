//! Classical neural components: fully-connected networks with exact
//! backpropagation, the small convolutional generator, and SGD/Adam
//! optimizers.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum OutputActivation {
    Sigmoid,
    Softmax,
}

/// Fully-connected network with ReLU hidden layers.
///
/// Weights for layer l are stored row-major with shape
/// (layer_sizes[l+1] x layer_sizes[l]).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MlpNetwork {
    pub layer_sizes: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub output_activation: OutputActivation,
}

/// Cached forward pass: pre-activations and activations per layer.
pub struct MlpCache {
    inputs: Vec<f64>,
    preacts: Vec<Vec<f64>>,
    activations: Vec<Vec<f64>>,
}

impl MlpCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("forward pass has layers")
    }
}

/// Parameter gradients in the same shapes as the network.
#[derive(Clone, Debug)]
pub struct MlpGradients {
    pub d_weights: Vec<Vec<f64>>,
    pub d_biases: Vec<Vec<f64>>,
}

impl MlpGradients {
    pub fn zeros_like(net: &MlpNetwork) -> Self {
        Self {
            d_weights: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            d_biases: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn add(&mut self, other: &MlpGradients) {
        for (a, b) in self.d_weights.iter_mut().zip(&other.d_weights) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.d_biases.iter_mut().zip(&other.d_biases) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for w in &mut self.d_weights {
            for x in w {
                *x *= factor;
            }
        }
        for b in &mut self.d_biases {
            for x in b {
                *x *= factor;
            }
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.d_weights.iter().zip(&self.d_biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl MlpNetwork {
    /// Fresh network with uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights.
    pub fn new(layer_sizes: &[usize], output_activation: OutputActivation, rng: &mut Rng) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::InvalidConfig("network needs at least two layers".into()));
        }
        if layer_sizes.iter().any(|&n| n == 0) {
            return Err(Error::InvalidConfig("zero-width layer".into()));
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            weights.push((0..fan_in * fan_out).map(|_| rng.gen_range(-bound..bound)).collect());
            biases.push((0..fan_out).map(|_| rng.gen_range(-bound..bound)).collect());
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            output_activation,
        })
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>() + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    pub fn forward(&self, input: &[f64]) -> Result<MlpCache> {
        if input.len() != self.layer_sizes[0] {
            return Err(Error::DimensionMismatch {
                context: format!("input length {} for first layer {}", input.len(), self.layer_sizes[0]),
            });
        }
        if input.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("network input".into()));
        }
        let n_layers = self.weights.len();
        let mut preacts = Vec::with_capacity(n_layers);
        let mut activations = Vec::with_capacity(n_layers);
        let mut current = input.to_vec();
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let fan_in = self.layer_sizes[l];
            let fan_out = self.layer_sizes[l + 1];
            let mut z = vec![0.0; fan_out];
            for j in 0..fan_out {
                let row = &w[j * fan_in..(j + 1) * fan_in];
                z[j] = b[j] + row.iter().zip(&current).map(|(wi, xi)| wi * xi).sum::<f64>();
            }
            let a: Vec<f64> = if l + 1 == n_layers {
                match self.output_activation {
                    OutputActivation::Sigmoid => z.iter().map(|&x| sigmoid(x)).collect(),
                    OutputActivation::Softmax => {
                        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        let exps: Vec<f64> = z.iter().map(|&x| (x - max).exp()).collect();
                        let total: f64 = exps.iter().sum();
                        exps.iter().map(|e| e / total).collect()
                    }
                }
            } else {
                z.iter().map(|&x| x.max(0.0)).collect()
            };
            preacts.push(z);
            activations.push(a.clone());
            current = a;
        }
        Ok(MlpCache {
            inputs: input.to_vec(),
            preacts,
            activations,
        })
    }

    /// Exact gradients of a scalar loss given dL/d(output).
    /// Returns the parameter gradients and dL/d(input).
    pub fn backward(&self, cache: &MlpCache, upstream: &[f64]) -> (MlpGradients, Vec<f64>) {
        let n_layers = self.weights.len();
        let out = cache.output();
        // Activation Jacobian of the head.
        let mut delta: Vec<f64> = match self.output_activation {
            OutputActivation::Sigmoid => upstream
                .iter()
                .zip(out)
                .map(|(&u, &y)| u * y * (1.0 - y))
                .collect(),
            OutputActivation::Softmax => {
                let dot: f64 = upstream.iter().zip(out).map(|(u, y)| u * y).sum();
                upstream.iter().zip(out).map(|(&u, &y)| y * (u - dot)).collect()
            }
        };
        let mut grads = MlpGradients::zeros_like(self);
        for l in (0..n_layers).rev() {
            if l < n_layers - 1 {
                // ReLU mask for hidden layers.
                for (d, z) in delta.iter_mut().zip(&cache.preacts[l]) {
                    if *z <= 0.0 {
                        *d = 0.0;
                    }
                }
            }
            let fan_in = self.layer_sizes[l];
            let prev: &[f64] = if l == 0 { &cache.inputs } else { &cache.activations[l - 1] };
            for (j, &d) in delta.iter().enumerate() {
                grads.d_biases[l][j] = d;
                for (i, &x) in prev.iter().enumerate() {
                    grads.d_weights[l][j * fan_in + i] = d * x;
                }
            }
            if l > 0 {
                let mut next = vec![0.0; fan_in];
                for (j, &d) in delta.iter().enumerate() {
                    for i in 0..fan_in {
                        next[i] += d * self.weights[l][j * fan_in + i];
                    }
                }
                delta = next;
            } else {
                let mut dinput = vec![0.0; fan_in];
                for (j, &d) in delta.iter().enumerate() {
                    for i in 0..fan_in {
                        dinput[i] += d * self.weights[l][j * fan_in + i];
                    }
                }
                return (grads, dinput);
            }
        }
        unreachable!("network has at least one layer")
    }

    pub fn flatten_params(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(Error::DimensionMismatch {
                context: format!("{} values for {} parameters", flat.len(), self.n_params()),
            });
        }
        let mut offset = 0;
        for (w, b) in self.weights.iter_mut().zip(&mut self.biases) {
            let wl = w.len();
            w.copy_from_slice(&flat[offset..offset + wl]);
            offset += wl;
            let bl = b.len();
            b.copy_from_slice(&flat[offset..offset + bl]);
            offset += bl;
        }
        Ok(())
    }
}

/// Discriminator builder: explicit layer sizes with a sigmoid head.
///
/// Reference settings: digits images use [64, 64, 16, 1] (5217 parameters);
/// the 2x2 bar task ships [4, 16, 1] (97 parameters) as the closest
/// reconstruction of the reported 96-parameter discriminator.
pub fn build_patch_discriminator(layer_sizes: &[usize], rng: &mut Rng) -> Result<MlpNetwork> {
    if layer_sizes.last() != Some(&1) {
        return Err(Error::InvalidConfig("discriminator head must be a single unit".into()));
    }
    MlpNetwork::new(layer_sizes, OutputActivation::Sigmoid, rng)
}

pub const DIGITS_DISCRIMINATOR_LAYERS: [usize; 4] = [64, 64, 16, 1];
pub const BAR_DISCRIMINATOR_LAYERS: [usize; 3] = [4, 16, 1];

/// Small convolutional generator for 2x2 images.
///
/// A (1 x noise_dim) kernel per hidden channel maps the noise row to a
/// column of `channels` ReLU features; a shared (2x1) kernel slides over
/// that column, adjacent outputs are average-pooled down to four values, and
/// a softmax yields the 2x2 image. Parameter count:
/// channels * (noise_dim + 1) + 3.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CnnGenerator {
    pub noise_dim: usize,
    pub channels: usize,
    pub conv1_w: Vec<f64>, // channels x noise_dim
    pub conv1_b: Vec<f64>, // channels
    pub conv2_w: [f64; 2],
    pub conv2_b: f64,
}

pub struct CnnCache {
    noise: Vec<f64>,
    hidden_pre: Vec<f64>,
    hidden: Vec<f64>,
    output: Vec<f64>,
}

impl CnnCache {
    pub fn output(&self) -> &[f64] {
        &self.output
    }
}

impl CnnGenerator {
    pub fn new(noise_dim: usize, channels: usize, rng: &mut Rng) -> Result<Self> {
        if noise_dim == 0 {
            return Err(Error::InvalidConfig("noise dimension must be positive".into()));
        }
        if channels < 5 || (channels - 1) % 4 != 0 {
            return Err(Error::InvalidConfig(
                "channels must be 4k+1 with k >= 1 so pooling yields four pixels".into(),
            ));
        }
        let bound = 1.0 / (noise_dim as f64).sqrt();
        Ok(Self {
            noise_dim,
            channels,
            conv1_w: (0..channels * noise_dim).map(|_| rng.gen_range(-bound..bound)).collect(),
            conv1_b: (0..channels).map(|_| rng.gen_range(-bound..bound)).collect(),
            conv2_w: [rng.gen_range(-bound..bound), rng.gen_range(-bound..bound)],
            conv2_b: rng.gen_range(-bound..bound),
        })
    }

    pub fn n_params(&self) -> usize {
        self.channels * (self.noise_dim + 1) + 3
    }

    fn pool_size(&self) -> usize {
        (self.channels - 1) / 4
    }

    pub fn forward(&self, noise: &[f64]) -> Result<CnnCache> {
        if noise.len() != self.noise_dim {
            return Err(Error::DimensionMismatch {
                context: format!("noise of length {} for input width {}", noise.len(), self.noise_dim),
            });
        }
        let mut hidden_pre = vec![0.0; self.channels];
        for c in 0..self.channels {
            let row = &self.conv1_w[c * self.noise_dim..(c + 1) * self.noise_dim];
            hidden_pre[c] = self.conv1_b[c] + row.iter().zip(noise).map(|(w, x)| w * x).sum::<f64>();
        }
        let hidden: Vec<f64> = hidden_pre.iter().map(|&x| x.max(0.0)).collect();
        let positions = self.channels - 1;
        let mut conv2 = vec![0.0; positions];
        for j in 0..positions {
            conv2[j] = self.conv2_w[0] * hidden[j] + self.conv2_w[1] * hidden[j + 1] + self.conv2_b;
        }
        let k = self.pool_size();
        let pooled: Vec<f64> = (0..4)
            .map(|g| conv2[g * k..(g + 1) * k].iter().sum::<f64>() / k as f64)
            .collect();
        let max = pooled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = pooled.iter().map(|&x| (x - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        let output: Vec<f64> = exps.iter().map(|e| e / total).collect();
        Ok(CnnCache {
            noise: noise.to_vec(),
            hidden_pre,
            hidden,
            output,
        })
    }

    /// Gradients of a scalar loss given dL/d(output pixels). Returned flat
    /// in the order conv1_w, conv1_b, conv2_w, conv2_b.
    pub fn backward(&self, cache: &CnnCache, upstream: &[f64]) -> Vec<f64> {
        let y = &cache.output;
        let dot: f64 = upstream.iter().zip(y).map(|(u, o)| u * o).sum();
        let d_pooled: Vec<f64> = upstream.iter().zip(y).map(|(&u, &o)| o * (u - dot)).collect();
        let k = self.pool_size();
        let positions = self.channels - 1;
        let mut d_conv2 = vec![0.0; positions];
        for (g, &dp) in d_pooled.iter().enumerate() {
            for j in g * k..(g + 1) * k {
                d_conv2[j] = dp / k as f64;
            }
        }
        let mut d_hidden = vec![0.0; self.channels];
        let mut d_w2 = [0.0f64; 2];
        let mut d_b2 = 0.0;
        for (j, &d) in d_conv2.iter().enumerate() {
            d_w2[0] += d * cache.hidden[j];
            d_w2[1] += d * cache.hidden[j + 1];
            d_b2 += d;
            d_hidden[j] += d * self.conv2_w[0];
            d_hidden[j + 1] += d * self.conv2_w[1];
        }
        let mut d_w1 = vec![0.0; self.channels * self.noise_dim];
        let mut d_b1 = vec![0.0; self.channels];
        for c in 0..self.channels {
            if cache.hidden_pre[c] <= 0.0 {
                continue;
            }
            d_b1[c] = d_hidden[c];
            for (i, &z) in cache.noise.iter().enumerate() {
                d_w1[c * self.noise_dim + i] = d_hidden[c] * z;
            }
        }
        let mut flat = d_w1;
        flat.extend(d_b1);
        flat.extend(d_w2);
        flat.push(d_b2);
        flat
    }

    pub fn flatten_params(&self) -> Vec<f64> {
        let mut flat = self.conv1_w.clone();
        flat.extend(&self.conv1_b);
        flat.extend(self.conv2_w);
        flat.push(self.conv2_b);
        flat
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(Error::DimensionMismatch {
                context: format!("{} values for {} CNN parameters", flat.len(), self.n_params()),
            });
        }
        let nw = self.channels * self.noise_dim;
        self.conv1_w.copy_from_slice(&flat[..nw]);
        self.conv1_b.copy_from_slice(&flat[nw..nw + self.channels]);
        self.conv2_w = [flat[nw + self.channels], flat[nw + self.channels + 1]];
        self.conv2_b = flat[nw + self.channels + 2];
        Ok(())
    }
}

/// Optimizer state over one flat parameter vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Optimizer {
    Sgd {
        lr: f64,
        momentum: f64,
        nesterov: bool,
        velocity: Vec<f64>,
    },
    Adam {
        lr: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
        m: Vec<f64>,
        v: Vec<f64>,
        step: u64,
    },
}

impl Optimizer {
    pub fn sgd(lr: f64) -> Self {
        Optimizer::Sgd { lr, momentum: 0.0, nesterov: false, velocity: Vec::new() }
    }

    pub fn sgd_nesterov(lr: f64, momentum: f64) -> Self {
        Optimizer::Sgd { lr, momentum, nesterov: true, velocity: Vec::new() }
    }

    /// Adam with the standard defaults beta1=0.9, beta2=0.999, eps=1e-8.
    pub fn adam(lr: f64) -> Self {
        Optimizer::Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            m: Vec::new(),
            v: Vec::new(),
            step: 0,
        }
    }

    /// One descent step in place.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != grads.len() {
            return Err(Error::DimensionMismatch {
                context: format!("{} gradients for {} parameters", grads.len(), params.len()),
            });
        }
        if grads.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gradient".into()));
        }
        match self {
            Optimizer::Sgd { lr, momentum, nesterov, velocity } => {
                if *momentum == 0.0 {
                    for (p, g) in params.iter_mut().zip(grads) {
                        *p -= *lr * g;
                    }
                } else {
                    if velocity.len() != params.len() {
                        *velocity = vec![0.0; params.len()];
                    }
                    for ((p, g), v) in params.iter_mut().zip(grads).zip(velocity.iter_mut()) {
                        *v = *momentum * *v + g;
                        let update = if *nesterov { g + *momentum * *v } else { *v };
                        *p -= *lr * update;
                    }
                }
            }
            Optimizer::Adam { lr, beta1, beta2, epsilon, m, v, step } => {
                if m.len() != params.len() {
                    *m = vec![0.0; params.len()];
                    *v = vec![0.0; params.len()];
                }
                *step += 1;
                let k = *step as i32;
                let bc1 = 1.0 - beta1.powi(k);
                let bc2 = 1.0 - beta2.powi(k);
                for ((p, &g), (mi, vi)) in params.iter_mut().zip(grads).zip(m.iter_mut().zip(v.iter_mut())) {
                    *mi = *beta1 * *mi + (1.0 - *beta1) * g;
                    *vi = *beta2 * *vi + (1.0 - *beta2) * g * g;
                    let m_hat = *mi / bc1;
                    let v_hat = *vi / bc2;
                    *p -= *lr * m_hat / (v_hat.sqrt() + *epsilon);
                }
            }
        }
        Ok(())
    }
}
