//! Realization-theory engine: Markov parameters, reachability, Kalman
//! decomposition, structure-preserving minimal extraction and output
//! evolution.

pub mod expm;
pub mod kalman;
pub mod rank;
pub mod spt;
pub mod system;

pub use expm::{evolve_output, evolve_output_pade, expm, SpectralPropagator};
pub use kalman::{kalman_decompose, BlockLayout, DecompositionResult};
pub use rank::{numerical_rank, rank_report, RankReport};
pub use spt::{spt_extract_minimal, SptResult};
pub use system::{permutation_matrix, unit, LinearSystem};
