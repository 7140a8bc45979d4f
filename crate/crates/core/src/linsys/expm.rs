//! Output evolution `y(t) = C exp(At) B`.
//!
//! Two routes: a Padé scaling-and-squaring exponential for general `A`,
//! and a spectral route for antisymmetric `A` that diagonalises the
//! Hermitian matrix `iA` once and reuses the eigenbasis for every time.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::LinearSystem;

/// Relative antisymmetry tolerance that selects the spectral route.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

pub fn is_antisymmetric(a: &DMatrix<f64>, tol: f64) -> bool {
    if !a.is_square() {
        return false;
    }
    let scale = a.amax().max(1.0);
    (a + a.transpose()).amax() <= tol * scale
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone().exp()
}

/// Eigendecomposition of `iA` for antisymmetric `A`, cached for repeated
/// evaluation of `exp(At)`.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    eigenvalues: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl SpectralPropagator {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let h = a.map(|x| Complex64::new(0.0, x));
        let eig = SymmetricEigen::new(h);
        SpectralPropagator {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    /// `exp(At) = V diag(exp(-i lambda t)) V^H` where `iA = V diag(lambda) V^H`.
    pub fn propagator(&self, t: f64) -> DMatrix<f64> {
        let phases = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues
                .iter()
                .map(|&l| Complex64::from_polar(1.0, -l * t)),
        );
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, j| {
            self.vectors[(i, j)] * phases[j]
        });
        (scaled * self.vectors.adjoint()).map(|z| z.re)
    }

    /// Scalar response `c exp(At) b` at each time.
    pub fn response(&self, c: &[f64], b: &[f64], times: &[f64]) -> Vec<f64> {
        let n = self.eigenvalues.len();
        let cv: Vec<Complex64> = (0..n)
            .map(|k| (0..n).map(|i| self.vectors[(i, k)] * c[i]).sum())
            .collect();
        let vb: Vec<Complex64> = (0..n)
            .map(|k| (0..n).map(|i| self.vectors[(i, k)].conj() * b[i]).sum())
            .collect();
        times
            .iter()
            .map(|&t| {
                (0..n)
                    .map(|k| cv[k] * vb[k] * Complex64::from_polar(1.0, -self.eigenvalues[k] * t))
                    .sum::<Complex64>()
                    .re
            })
            .collect()
    }
}

/// `y(t_i) = C exp(A t_i) B`.
pub fn evolve_output(sys: &LinearSystem, times: &[f64]) -> Vec<f64> {
    if is_antisymmetric(&sys.a, ANTISYMMETRY_TOL) {
        let spectral = SpectralPropagator::new(&sys.a);
        spectral.response(sys.c.as_slice(), sys.b.as_slice(), times)
    } else {
        evolve_output_pade(sys, times)
    }
}

/// Padé route regardless of structure.
pub fn evolve_output_pade(sys: &LinearSystem, times: &[f64]) -> Vec<f64> {
    times
        .iter()
        .map(|&t| {
            let e = expm(&(&sys.a * t));
            sys.c.dot(&(e * &sys.b).transpose())
        })
        .collect()
}
