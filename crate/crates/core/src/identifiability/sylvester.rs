//! Kronecker-sum form of `A X + X B = C`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linsys::numerical_rank;

/// `I ⊗ A + B^T ⊗ I`, acting on column-major `vec(X)`.
pub fn kronecker_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let ia = DMatrix::<f64>::identity(b.nrows(), b.nrows());
    let ib = DMatrix::<f64>::identity(a.nrows(), a.nrows());
    ia.kronecker(a) + b.transpose().kronecker(&ib)
}

/// Whether `X -> A X + X B` is invertible (numerical rank test).
pub fn sylvester_nonsingular(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    let k = kronecker_sum(a, b);
    numerical_rank(&k, None) == k.nrows()
}

/// Solves `A X + X B = C`.
pub fn solve_sylvester(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let (m, n) = (a.nrows(), b.nrows());
    if a.ncols() != m || b.ncols() != n || c.shape() != (m, n) {
        return Err(Error::Dimension(
            "Sylvester operands have inconsistent shapes".into(),
        ));
    }
    let k = kronecker_sum(a, b);
    let sv = k.singular_values();
    let cond = sv.max() / sv.min();
    if !(cond < 1e12) {
        return Err(Error::Conditioning {
            what: "Sylvester operator".into(),
            condition: cond,
            threshold: 1e12,
        });
    }
    let rhs = DVector::from_column_slice(c.as_slice());
    let x = k
        .lu()
        .solve(&rhs)
        .expect("nonsingular by the condition check");
    Ok(DMatrix::from_column_slice(m, n, x.as_slice()))
}

/// `||W A + A W||_F` for `W = X^T X - Y^T Y`.
pub fn gram_anticommutator_residual(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    abar: &DMatrix<f64>,
) -> f64 {
    let w = x.transpose() * x - y.transpose() * y;
    (&w * abar + abar * &w).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_equation() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 3.0]);
        let b = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 1.0, -4.0]);
        let x = DMatrix::from_row_slice(2, 2, &[0.3, -1.0, 2.0, 0.7]);
        let c = &a * &x + &x * &b;
        let solved = solve_sylvester(&a, &b, &c).unwrap();
        assert!((solved - x).amax() < 1e-12);
    }

    #[test]
    fn opposite_spectra_are_singular() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        assert!(!sylvester_nonsingular(&a, &(-&a)));
        assert!(sylvester_nonsingular(&a, &a));
    }
}
