//! Identifiability of the probed chain parameters: equivalence residuals,
//! the two criteria, constructive counterexamples and genericity probes.

pub mod atypical;
pub mod criterion1;
pub mod search;
pub mod sta;
pub mod sylvester;
pub mod theorem2;
pub mod verdict;

pub use atypical::{atypicality_probe, AtypicalPredicate, ATYPICAL_PROBE_TOL};
pub use criterion1::{criterion1_from_decomposition, criterion1_unidentifiable_params};
pub use search::{criterion2_search, SearchBudget, SearchOutcome, CONFIRM_TOL};
pub use sta::{
    magnitude_gap, markov_count, markov_distance, markov_distance_over, markov_distance_raw,
    output_equivalence_distance, sta_residual, StaCandidate,
};
pub use sylvester::{
    gram_anticommutator_residual, kronecker_sum, solve_sylvester, sylvester_nonsingular,
};
pub use theorem2::{
    lemma17_select_k, theorem2_counterexample, CertificateCheck, Construction,
    CounterexampleCertificate, Lemma17Selection, MAGNITUDE_GAP_TOL, MARKOV_TOL, ORTHOGONALITY_TOL,
    SUPPORT_TOL,
};
pub use verdict::{
    assess_identifiability, expected_status, Evidence, IdentifiabilityVerdict, Status,
};
