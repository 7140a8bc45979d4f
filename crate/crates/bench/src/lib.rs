//! Deterministic inputs for the benchmarks.

use nalgebra::DMatrix;
use spinid_core::spin_models::build_linear_model;
use spinid_core::{Family, HamiltonianSpec, LinearSystem, Measurement};

/// Parameters `theta_i = (-1)^i (0.5 + 0.1 i)`.
pub fn theta(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i % 2 == 0 {
                0.5 + 0.1 * i as f64
            } else {
                -(0.5 + 0.1 * i as f64)
            }
        })
        .collect()
}

pub fn chain(n: usize) -> LinearSystem {
    let spec = HamiltonianSpec::new(Family::ExchangeNoField, theta(n), Measurement::X1)
        .expect("valid chain");
    build_linear_model(&spec).expect("chain model")
}

/// Dense `n x n` matrix with entries in `[-1, 1]` from a fixed recurrence.
pub fn dense(n: usize) -> DMatrix<f64> {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    DMatrix::from_fn(n, n, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    })
}

/// Chain padded with a decoupled block so the decomposition has work to do.
pub fn padded_chain(n: usize, extra: usize) -> LinearSystem {
    let base = chain(n);
    let d = base.dim() + extra;
    let mut a = DMatrix::zeros(d, d);
    a.view_mut((0, 0), (base.dim(), base.dim()))
        .copy_from(&base.a);
    a.view_mut((base.dim(), base.dim()), (extra, extra))
        .copy_from(&dense(extra));
    let mut b = nalgebra::DVector::zeros(d);
    b.rows_mut(0, base.dim()).copy_from(&base.b);
    let mut c = nalgebra::RowDVector::zeros(d);
    c.columns_mut(0, base.dim()).copy_from(&base.c);
    LinearSystem::new(a, b, c).expect("consistent shapes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_expected_shapes() {
        assert_eq!(chain(6).dim(), 7);
        assert_eq!(padded_chain(4, 3).dim(), 8);
        assert!(dense(5).amax() <= 1.0);
        assert_eq!(theta(3), vec![0.5, -0.6, 0.7]);
    }
}
