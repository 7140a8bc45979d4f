use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linsys::LinearSystem;
use crate::spin_models::{build_linear_model_with, HamiltonianSpec};

/// Candidate solution `(S, theta, theta')` of
/// `S A(theta) = A(theta') S`, `S x0 = x0`, `C = C S`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaCandidate {
    pub s: DMatrix<f64>,
    pub theta: Vec<f64>,
    pub theta_prime: Vec<f64>,
}

/// Sum of Frobenius norms of the three equation residuals.
pub fn sta_residual(spec: &HamiltonianSpec, candidate: &StaCandidate) -> Result<f64> {
    let sys = build_linear_model_with(spec, &candidate.theta)?;
    let alt = build_linear_model_with(spec, &candidate.theta_prime)?;
    let s = &candidate.s;
    let n = sys.dim();
    if s.nrows() != n || s.ncols() != n {
        return Err(Error::Dimension(format!(
            "S is {}x{}, model has dimension {n}",
            s.nrows(),
            s.ncols()
        )));
    }
    let dynamics = (s * &sys.a - &alt.a * s).norm();
    let initial = (s * &sys.b - &sys.b).norm();
    let output = (&sys.c - &sys.c * s).norm();
    Ok(dynamics + initial + output)
}

/// Number of Markov parameters compared: `2 dim`.
pub fn markov_count(sys: &LinearSystem) -> usize {
    2 * sys.dim()
}

/// `max_k |CA^kB - C'A'^kB'| / rho^k` with `rho = max(1, ||A||_2)` taken from
/// the reference system. The scaling keeps the comparison meaningful when
/// the raw sequence grows like `||A||^k`.
pub fn markov_distance(reference: &LinearSystem, other: &LinearSystem) -> f64 {
    markov_distance_over(reference, other, markov_count(reference))
}

/// [`markov_distance`] over the first `count` terms.
pub fn markov_distance_over(reference: &LinearSystem, other: &LinearSystem, count: usize) -> f64 {
    let rho = reference.markov_scale();
    let m1 = reference.markov_parameters(count);
    let m2 = other.markov_parameters(count);
    let mut scale = 1.0;
    let mut worst = 0.0f64;
    for (a, b) in m1.iter().zip(&m2) {
        worst = worst.max((a - b).abs() / scale);
        scale *= rho;
    }
    worst
}

/// Unscaled `max_k |CA^kB - C'A'^kB'|` over the first `2 dim` terms.
pub fn markov_distance_raw(reference: &LinearSystem, other: &LinearSystem) -> f64 {
    let count = markov_count(reference);
    let m1 = reference.markov_parameters(count);
    let m2 = other.markov_parameters(count);
    m1.iter()
        .zip(&m2)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Output-equivalence distance between two parameter vectors of one family.
pub fn output_equivalence_distance(
    spec: &HamiltonianSpec,
    theta: &[f64],
    theta_prime: &[f64],
) -> Result<f64> {
    let sys = build_linear_model_with(spec, theta)?;
    let alt = build_linear_model_with(spec, theta_prime)?;
    Ok(markov_distance(&sys, &alt))
}

/// `max_i ||theta'_i| - |theta_i||`.
pub fn magnitude_gap(theta: &[f64], theta_prime: &[f64]) -> f64 {
    theta
        .iter()
        .zip(theta_prime)
        .map(|(a, b)| (a.abs() - b.abs()).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_models::{Family, Measurement};

    fn chain(theta: Vec<f64>) -> HamiltonianSpec {
        HamiltonianSpec::new(Family::ExchangeNoField, theta, Measurement::X1).unwrap()
    }

    #[test]
    fn trivial_solution() {
        let spec = chain(vec![0.4, -1.1, 0.9]);
        let c = StaCandidate {
            s: DMatrix::identity(4, 4),
            theta: spec.theta.clone(),
            theta_prime: spec.theta.clone(),
        };
        assert_eq!(sta_residual(&spec, &c).unwrap(), 0.0);
    }

    #[test]
    fn sign_flip_solution() {
        let spec = chain(vec![0.4, -1.1, 0.9]);
        let signs = [1.0, -1.0, 1.0, 1.0];
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&signs));
        let theta_prime: Vec<f64> = (0..3)
            .map(|i| signs[i] * signs[i + 1] * spec.theta[i])
            .collect();
        let c = StaCandidate {
            s,
            theta: spec.theta.clone(),
            theta_prime: theta_prime.clone(),
        };
        assert_eq!(sta_residual(&spec, &c).unwrap(), 0.0);
        assert!(output_equivalence_distance(&spec, &spec.theta, &theta_prime).unwrap() < 1e-10);
    }

    #[test]
    fn perturbed_candidate_is_positive() {
        let spec = chain(vec![0.4, -1.1, 0.9]);
        let mut s = DMatrix::identity(4, 4);
        s[(2, 3)] = 1e-3;
        let c = StaCandidate {
            s,
            theta: spec.theta.clone(),
            theta_prime: spec.theta.clone(),
        };
        assert!(sta_residual(&spec, &c).unwrap() > 1e-6);
    }

    #[test]
    fn wrong_size_rejected() {
        let spec = chain(vec![0.4]);
        let c = StaCandidate {
            s: DMatrix::identity(3, 3),
            theta: spec.theta.clone(),
            theta_prime: spec.theta.clone(),
        };
        assert!(matches!(sta_residual(&spec, &c), Err(Error::Dimension(_))));
    }
}
