//! Orthogonal Kalman decomposition.
//!
//! The controllable subspace is spanned by an Arnoldi (staircase) basis of
//! the Krylov sequence `B, AB, ...`; inside it the observable part is found
//! the same way from `C^T, A^T C^T, ...`. States are ordered as
//! `[controllable & observable | controllable & unobservable | uncontrollable]`
//! so the minimal subsystem is the leading block.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::rank::{rank_report, RankReport};
use super::LinearSystem;

/// Relative threshold on Arnoldi residuals, scaled by `max(||A||_2, ||v0||)`.
pub const DEFAULT_KRYLOV_TOL: f64 = 1e-10;

/// Orthonormal Krylov basis together with the residual norms that decided
/// where it stopped.
#[derive(Debug, Clone)]
pub struct KrylovBasis {
    pub vectors: Vec<DVector<f64>>,
    /// Norm of each accepted direction before normalisation, followed by the
    /// first rejected residual (if the sequence stopped early).
    pub residuals: Vec<f64>,
    pub threshold: f64,
}

impl KrylovBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Smallest accepted residual over the first rejected one.
    pub fn gap(&self) -> f64 {
        let k = self.vectors.len();
        if k == 0 || self.residuals.len() <= k {
            return f64::INFINITY;
        }
        let rejected = self.residuals[k];
        let kept = self.residuals[..k]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if rejected == 0.0 {
            f64::INFINITY
        } else {
            kept / rejected
        }
    }

    pub fn matrix(&self, n: usize) -> DMatrix<f64> {
        if self.vectors.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&self.vectors)
        }
    }
}

/// Arnoldi with two passes of Gram-Schmidt per step.
pub fn krylov_basis(a: &DMatrix<f64>, start: &DVector<f64>, rel_tol: f64) -> KrylovBasis {
    let n = a.nrows();
    let scale = a
        .singular_values()
        .max()
        .max(start.norm())
        .max(f64::MIN_POSITIVE);
    let threshold = rel_tol * scale;
    let mut vectors: Vec<DVector<f64>> = Vec::new();
    let mut residuals = Vec::new();
    let mut w = start.clone();
    while vectors.len() < n {
        for _ in 0..2 {
            for q in &vectors {
                let h = q.dot(&w);
                w.axpy(-h, q, 1.0);
            }
        }
        let h = w.norm();
        residuals.push(h);
        if h <= threshold {
            break;
        }
        let q = w / h;
        w = a * &q;
        vectors.push(q);
    }
    KrylovBasis {
        vectors,
        residuals,
        threshold,
    }
}

/// Orthonormal basis of the complement of the column span of `q`
/// (which must have orthonormal columns).
pub fn orthogonal_complement(q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = q.nrows();
    let r = q.ncols();
    if r == n {
        return DMatrix::zeros(n, 0);
    }
    let proj = DMatrix::identity(n, n) - q * q.transpose();
    let eig = SymmetricEigen::new(proj);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let cols: Vec<DVector<f64>> = idx[..n - r]
        .iter()
        .map(|&i| {
            let mut v = eig.eigenvectors.column(i).into_owned();
            for k in 0..r {
                let h = q.column(k).dot(&v);
                v.axpy(-h, &q.column(k).into_owned(), 1.0);
            }
            v.normalize()
        })
        .collect();
    DMatrix::from_columns(&cols)
}

/// Sizes of the canonical blocks, in state order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub minimal: usize,
    pub controllable_unobservable: usize,
    pub uncontrollable: usize,
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    /// Orthogonal `T` with `transformed = (T A T^T, T B, C T^T)`.
    pub transform: DMatrix<f64>,
    pub transformed: LinearSystem,
    pub minimal_dim: usize,
    pub block_layout: BlockLayout,
    pub controllable_gap: f64,
    pub observable_gap: f64,
    /// Rank checks on the extracted minimal block.
    pub minimal_controllability: RankReport,
    pub minimal_observability: RankReport,
}

impl DecompositionResult {
    pub fn minimal(&self) -> LinearSystem {
        self.transformed.leading_block(self.minimal_dim)
    }
}

pub fn kalman_decompose(sys: &LinearSystem) -> DecompositionResult {
    kalman_decompose_with_tol(sys, DEFAULT_KRYLOV_TOL)
}

pub fn kalman_decompose_with_tol(sys: &LinearSystem, rel_tol: f64) -> DecompositionResult {
    let n = sys.dim();

    let ctrl = krylov_basis(&sys.a, &sys.b, rel_tol);
    let qc = ctrl.matrix(n);
    let rc = qc.ncols();
    let q1 = hstack(&qc, &orthogonal_complement(&qc));

    // Controllable block in the first coordinates.
    let acc = qc.transpose() * &sys.a * &qc;
    let ccc = &sys.c * &qc;

    let obs = krylov_basis(&acc.transpose(), &ccc.transpose(), rel_tol);
    let qo = obs.matrix(rc);
    let ro = qo.ncols();
    let r = hstack(&qo, &orthogonal_complement(&qo));

    let mut inner = DMatrix::identity(n, n);
    inner.view_mut((0, 0), (rc, rc)).copy_from(&r.transpose());
    let transform = inner * q1.transpose();
    let transformed = sys.apply_pair(&transform, &transform.transpose());

    let minimal = transformed.leading_block(ro);
    let (cm, om) = minimal.reachability_matrices();

    DecompositionResult {
        transform,
        minimal_dim: ro,
        block_layout: BlockLayout {
            minimal: ro,
            controllable_unobservable: rc - ro,
            uncontrollable: n - rc,
        },
        controllable_gap: ctrl.gap(),
        observable_gap: obs.gap(),
        minimal_controllability: rank_report(&cm, None),
        minimal_observability: rank_report(&om, None),
        transformed,
    }
}

fn hstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsys::system::{max_abs_diff, unit};
    use approx::assert_relative_eq;

    fn example_one(t1: f64, t2: f64) -> LinearSystem {
        let a = DMatrix::from_row_slice(2, 2, &[t1, 0.0, 0.0, t2]);
        LinearSystem::new(a, unit(2, 0), unit(2, 0).transpose()).unwrap()
    }

    #[test]
    fn diagonal_example_reduces_to_one_state() {
        let dec = kalman_decompose(&example_one(0.8, -1.3));
        assert_eq!(dec.minimal_dim, 1);
        assert_relative_eq!(dec.minimal().a[(0, 0)], 0.8, epsilon = 1e-14);
        assert_eq!(dec.block_layout.uncontrollable, 1);
    }

    #[test]
    fn minimal_system_keeps_dimension() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 2.0, 0.0, -2.0, 0.0]);
        let sys = LinearSystem::new(a, unit(3, 0), unit(3, 0).transpose()).unwrap();
        let dec = kalman_decompose(&sys);
        assert_eq!(dec.minimal_dim, 3);
        assert!(dec.minimal_controllability.is_full(3));
        let m1 = sys.markov_parameters(6);
        let m2 = dec.minimal().markov_parameters(6);
        assert!(max_abs_diff(&m1, &m2) < 1e-12);
    }

    #[test]
    fn transform_is_orthogonal() {
        let dec = kalman_decompose(&example_one(0.8, -1.3));
        let t = &dec.transform;
        assert_relative_eq!(t * t.transpose(), DMatrix::identity(2, 2), epsilon = 1e-14);
    }

    #[test]
    fn complement_spans_rest() {
        let q = DMatrix::from_columns(&[unit(4, 1)]);
        let c = orthogonal_complement(&q);
        assert_eq!(c.ncols(), 3);
        assert!((q.transpose() * &c).amax() < 1e-14);
        assert_relative_eq!(c.transpose() * &c, DMatrix::identity(3, 3), epsilon = 1e-14);
    }
}
