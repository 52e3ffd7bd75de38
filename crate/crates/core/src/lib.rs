//! Evolution of discriminative spectral indices by genetic programming.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! clocks or the terminal lives in the `specgp` companion crate.
//!
//! Layout:
//!
//! * [`expr`]: the expression-tree genotype, protected arithmetic, the infix
//!   formula format and a batch evaluator over band columns.
//! * [`schema`] and [`indices`]: sensor band sets and the NDVI/EVI/EVI2
//!   baselines written in the same tree algebra.
//! * [`engine`]: separability fitness, tournament selection, subtree
//!   crossover and mutation, and the generational loop.
//! * [`classify`]: nearest-centroid classification in index space, logistic
//!   confidence scores and confusion summaries.
//! * [`tseries`]: monthly compositing, gap interpolation, DTW 1-NN and the
//!   5x2 cross-validation protocol.
//! * [`stats`]: Friedman, Wilcoxon signed-rank, Bonferroni and verdicts.
//! * [`analysis`]: band histograms and formula-element rankings.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod classify;
pub mod dataset;
pub mod engine;
pub mod expr;
pub mod indices;
pub mod schema;
pub mod stats;
pub mod tseries;

mod special;

pub use dataset::{DatasetError, Label, PixelDataset};
pub use engine::{evolve, fitness, EvolutionResult, GPConfig, GenerationRecord, Individual};
pub use expr::{BinaryOp, ExprError, ExprTree, UnaryOp};
pub use schema::{BandSchema, SchemaError};

/// The RNG used everywhere a seed is accepted.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's RNG from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
