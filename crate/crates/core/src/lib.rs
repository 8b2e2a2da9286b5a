//! Feedforward recognition of spatio-temporal event (spike) patterns.
//!
//! Input events on `L` channels are expanded through a bank of `M` randomly
//! parameterized synaptic kernels (filters defined by their impulse response),
//! squashed by a compressive nonlinearity, and read out by a linear output
//! layer whose weights are the ridge-regularized least-squares solution
//! `W = Y Aᵀ (A Aᵀ + εI)⁻¹` — solved either in batch or online by
//! rank-one recursive updates. Thresholding the linear outputs turns the
//! readout into an event/no-event classifier.
//!
//! Modules:
//! - [`events`]: sparse event streams, continuous signals, Poisson
//!   generation, CSV I/O.
//! - [`kernels`]: the synaptic kernel families, truncation, streaming
//!   filtering.
//! - [`network`]: random hidden layer, forward pass, event thresholding,
//!   mixed event/continuous inputs.
//! - [`solver`]: batch and online regularized pseudoinverse solves.
//! - [`trainer`]: target widening, streaming weight solve, margin threshold
//!   fitting.
//! - [`analysis`]: spike-triggered receptive fields and cross-correlation
//!   scoring.
//! - [`bench`]: the attentional-switching word-detection experiment.

pub mod analysis;
pub mod bench;
pub mod error;
pub mod events;
pub mod kernels;
pub mod network;
pub mod solver;
pub mod trainer;

pub use error::{Result, SkimError};
