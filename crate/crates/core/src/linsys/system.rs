use nalgebra::{DMatrix, DVector, RowDVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the 2-norm condition number of a similarity transform.
pub const DEFAULT_CONDITION_LIMIT: f64 = 1e12;

/// Single-input single-output realization `(A, B, C, D)`.
///
/// `B` doubles as the initial state when the input is an impulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: RowDVector<f64>,
    pub d: f64,
}

impl LinearSystem {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: RowDVector<f64>) -> Result<Self> {
        let n = a.nrows();
        if n == 0 {
            return Err(Error::Dimension(
                "state dimension must be at least 1".into(),
            ));
        }
        if a.ncols() != n || b.len() != n || c.len() != n {
            return Err(Error::Dimension(format!(
                "A is {}x{}, B has {} rows, C has {} columns",
                a.nrows(),
                a.ncols(),
                b.len(),
                c.len()
            )));
        }
        Ok(LinearSystem { a, b, c, d: 0.0 })
    }

    /// System probing entry `(row, col)` of `a`: `B = e_col`, `C = e_row^T`
    /// (0-based indices).
    pub fn probe(a: DMatrix<f64>, row: usize, col: usize) -> Result<Self> {
        let n = a.nrows();
        if row >= n || col >= n {
            return Err(Error::Dimension(format!(
                "probe ({row},{col}) outside a {n}x{n} system"
            )));
        }
        LinearSystem::new(a, unit(n, col), unit(n, row).transpose())
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `(CB, CAB, ..., CA^{count-1}B)` by repeated matrix-vector products.
    pub fn markov_parameters(&self, count: usize) -> Vec<f64> {
        let mut x = self.b.clone();
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            if k > 0 {
                x = &self.a * x;
            }
            out.push(self.c.dot(&x.transpose()));
        }
        out
    }

    /// Controllability matrix `[B, AB, ..., A^{n-1}B]` and observability
    /// matrix `[C; CA; ...; CA^{n-1}]`.
    pub fn reachability_matrices(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.dim();
        let mut cm = DMatrix::zeros(n, n);
        let mut om = DMatrix::zeros(n, n);
        let mut col = self.b.clone();
        let mut row = self.c.clone();
        for k in 0..n {
            if k > 0 {
                col = &self.a * col;
                row *= &self.a;
            }
            cm.set_column(k, &col);
            om.set_row(k, &row);
        }
        (cm, om)
    }

    /// `(PAP^-1, PB, CP^-1, D)`; rejects `P` whose condition number exceeds
    /// [`DEFAULT_CONDITION_LIMIT`].
    pub fn similarity_transform(&self, p: &DMatrix<f64>) -> Result<Self> {
        self.similarity_transform_with_limit(p, DEFAULT_CONDITION_LIMIT)
    }

    pub fn similarity_transform_with_limit(&self, p: &DMatrix<f64>, limit: f64) -> Result<Self> {
        let n = self.dim();
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::Dimension(format!(
                "transform is {}x{}, system has dimension {n}",
                p.nrows(),
                p.ncols()
            )));
        }
        let sv = p.singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let cond = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        if !(cond <= limit) {
            return Err(Error::Conditioning {
                what: "similarity transform".into(),
                condition: cond,
                threshold: limit,
            });
        }
        let p_inv = p.clone().try_inverse().ok_or_else(|| Error::Conditioning {
            what: "similarity transform".into(),
            condition: f64::INFINITY,
            threshold: limit,
        })?;
        Ok(self.apply_pair(p, &p_inv))
    }

    /// Similarity with a caller-supplied inverse (permutations, orthogonal
    /// and unit-triangular transforms).
    pub(crate) fn apply_pair(&self, p: &DMatrix<f64>, p_inv: &DMatrix<f64>) -> Self {
        LinearSystem {
            a: p * &self.a * p_inv,
            b: p * &self.b,
            c: &self.c * p_inv,
            d: self.d,
        }
    }

    /// Reorders states so that new state `k` is old state `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let p = permutation_matrix(order)?;
        let pt = p.transpose();
        Ok(self.apply_pair(&p, &pt))
    }

    /// Leading `k`-dimensional block `(A[..k,..k], B[..k], C[..k])`.
    pub fn leading_block(&self, k: usize) -> Self {
        LinearSystem {
            a: self.a.view((0, 0), (k, k)).into_owned(),
            b: self.b.rows(0, k).into_owned(),
            c: self.c.columns(0, k).into_owned(),
            d: self.d,
        }
    }

    /// Scale used to compare Markov sequences: `max(1, ||A||_2)`.
    pub fn markov_scale(&self) -> f64 {
        self.a.singular_values().max().max(1.0)
    }
}

pub fn unit(n: usize, k: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[k] = 1.0;
    v
}

/// `P` with `(P x)_k = x_{order[k]}`.
pub fn permutation_matrix(order: &[usize]) -> Result<DMatrix<f64>> {
    let n = order.len();
    let mut seen = vec![false; n];
    let mut p = DMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        if j >= n || seen[j] {
            return Err(Error::Dimension(format!("{order:?} is not a permutation")));
        }
        seen[j] = true;
        p[(k, j)] = 1.0;
    }
    Ok(p)
}

/// Largest absolute difference between two sequences.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
