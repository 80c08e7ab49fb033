//! K-Means clustering built on Lloyd's algorithm.
//!
//! The crate provides a serial reference engine plus two shared-memory
//! parallel execution strategies (persistent workers synchronized by
//! barriers, and fork-per-step parallel regions), a seeded Gaussian-mixture
//! data generator, CSV/JSON file formats for datasets and results, and a
//! benchmark harness that derives speedup and efficiency tables from timed
//! runs.
//!
//! All strategies are deterministic: a fixed `(dataset, params)` pair,
//! including the seed and thread count, reproduces results bit-for-bit.

pub mod bench;
pub mod compare;
pub mod core;
pub mod datagen;
pub mod dataio;
pub mod engine;
pub mod rng;

mod error;

pub use error::{Error, Result};
