//! An estimation of distribution algorithm (EDA) that uses a denoising
//! autoencoder (DAE) as its probabilistic model, together with a univariate
//! PBIL baseline, three standard binary benchmark problems (concatenated
//! deceptive traps, NK landscapes, HIFF) and a sweep harness that measures
//! success rates and fitness-evaluation counts over population sizes.
//!
//! The main entry points are:
//!
//! * [`engine::run_eda`] / [`engine::EdaRun`] — run one optimization,
//!   either to completion or generation by generation,
//! * [`sweep::run_sweep`] / [`sweep::summarize_rows`] — repeated runs over a
//!   population-size ladder, persisted as CSV and summarized per success
//!   threshold,
//! * [`problems`] — the benchmark fitness functions, including an exact
//!   exhaustive solver for small NK instances.
//!
//! Everything stochastic draws from explicitly seeded [`rng::RngState`]
//! streams, so identical configurations reproduce identical results.

pub mod bits;
pub mod dae;
pub mod engine;
pub mod error;
pub mod pbil;
pub mod population;
pub mod problems;
pub mod rng;
pub mod selection;
pub mod sweep;

pub use bits::{binarize, Bitstring, RealVector};
pub use error::{Error, Result};
pub use population::{Individual, Population};
pub use rng::RngState;
