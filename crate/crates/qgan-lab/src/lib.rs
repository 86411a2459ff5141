//! Desk-scale laboratory for adversarial learning on a state-vector
//! simulator: quantum patch and batch generators built from layered
//! rotation/entangler circuits, classical network baselines, minimax and
//! kernel-based training loops, and Fréchet-Distance evaluation.
//!
//! The crate is organized as:
//! - [`qsim`]: dense state-vector simulation with postselection.
//! - [`ansatz`]: parametrized circuits, latent encoding, and the
//!   parameter-shift rule.
//! - [`qgan`]: patch and batch quantum generators plus the quantum
//!   discriminator.
//! - [`classical`]: fully-connected / convolutional baselines and optimizers.
//! - [`training`]: adversarial and kernel-moment training loops.
//! - [`metrics`]: Fréchet Distance, box statistics, and validity checks.
//! - [`data`]: bar-image synthesis, digits loading, amplitude encoding.
//! - [`cli`]: command-line entry points (`gen-data`, `train`, `eval-fd`,
//!   `sweep`).

pub mod ansatz;
pub mod classical;
pub mod cli;
pub mod data;
pub mod error;
pub mod metrics;
pub mod qgan;
pub mod qsim;
pub mod rng;
pub mod training;

pub use error::{Error, Result};
