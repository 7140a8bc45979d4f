use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::theorem2::sorted_eigen;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::spin_models::abar_from_theta;

pub const ATYPICAL_PROBE_TOL: f64 = 1e-9;

/// Degeneracies of `Abar` that the generic arguments exclude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtypicalPredicate {
    ZeroEigenvalue,
    /// `lambda_i + lambda_j = 0` for some `i, j` (including `i = j`).
    EigenvaluePairSumZero,
    MultipleEigenvalues,
}

impl AtypicalPredicate {
    pub const ALL: [AtypicalPredicate; 3] = [
        AtypicalPredicate::ZeroEigenvalue,
        AtypicalPredicate::EigenvaluePairSumZero,
        AtypicalPredicate::MultipleEigenvalues,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AtypicalPredicate::ZeroEigenvalue => "zero_eigenvalue",
            AtypicalPredicate::EigenvaluePairSumZero => "eigenvalue_pair_sum_zero",
            AtypicalPredicate::MultipleEigenvalues => "multiple_eigenvalues",
        }
    }

    /// Evaluates the predicate on ascending eigenvalues.
    pub fn holds(self, eigenvalues: &[f64], tol: f64) -> bool {
        let n = eigenvalues.len();
        match self {
            AtypicalPredicate::ZeroEigenvalue => eigenvalues.iter().any(|l| l.abs() <= tol),
            AtypicalPredicate::EigenvaluePairSumZero => {
                (0..n).any(|i| (i..n).any(|j| (eigenvalues[i] + eigenvalues[j]).abs() <= tol))
            }
            AtypicalPredicate::MultipleEigenvalues => {
                eigenvalues.windows(2).any(|w| (w[1] - w[0]).abs() <= tol)
            }
        }
    }
}

impl fmt::Display for AtypicalPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AtypicalPredicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AtypicalPredicate::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown predicate '{s}'")))
    }
}

/// Fraction of `theta ~ U[-2, 2]^n` for which the predicate holds on `Abar`.
pub fn atypicality_probe(
    predicate: AtypicalPredicate,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidModel(format!(
            "odd parameter count required, got {n}"
        )));
    }
    if samples == 0 {
        return Ok(0.0);
    }
    let hits: usize = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, &[i as u64]);
            let theta: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..=2.0)).collect();
            let abar = abar_from_theta(&theta).expect("odd length checked");
            let (e, _) = sorted_eigen(&abar, true);
            usize::from(predicate.holds(e.as_slice(), ATYPICAL_PROBE_TOL))
        })
        .sum();
    Ok(hits as f64 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicates_on_crafted_spectra() {
        let tol = 1e-9;
        assert!(AtypicalPredicate::ZeroEigenvalue.holds(&[-1.0, 0.0, 2.0], tol));
        assert!(AtypicalPredicate::EigenvaluePairSumZero.holds(&[-1.0, 0.5, 1.0], tol));
        assert!(AtypicalPredicate::MultipleEigenvalues.holds(&[0.3, 0.3, 1.0], tol));
        for p in AtypicalPredicate::ALL {
            assert!(!p.holds(&[-1.5, 0.4, 2.0], tol));
        }
    }

    #[test]
    fn names_round_trip() {
        for p in AtypicalPredicate::ALL {
            assert_eq!(p.name().parse::<AtypicalPredicate>().unwrap(), p);
        }
    }

    #[test]
    fn probe_is_deterministic() {
        let a = atypicality_probe(AtypicalPredicate::MultipleEigenvalues, 5, 200, 3).unwrap();
        let b = atypicality_probe(AtypicalPredicate::MultipleEigenvalues, 5, 200, 3).unwrap();
        assert_eq!(a, b);
    }
}
