use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Outcome of a singular-value rank decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub tolerance: f64,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    /// Ratio between the smallest retained and the largest discarded
    /// singular value (`inf` when nothing was discarded or retained).
    pub gap: f64,
}

impl RankReport {
    pub fn is_full(&self, n: usize) -> bool {
        self.rank == n
    }
}

/// Number of singular values above `tol`; the default tolerance is
/// `max(rows, cols) * sigma_max * eps`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: Option<f64>) -> usize {
    rank_report(m, tol).rank
}

pub fn rank_report(m: &DMatrix<f64>, tol: Option<f64>) -> RankReport {
    if m.is_empty() {
        return RankReport {
            rank: 0,
            tolerance: 0.0,
            singular_values: Vec::new(),
            gap: f64::INFINITY,
        };
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let smax = sv[0];
    let tolerance = tol.unwrap_or_else(|| m.nrows().max(m.ncols()) as f64 * smax * f64::EPSILON);
    let rank = sv.iter().filter(|&&s| s > tolerance).count();
    let gap = if rank == 0 || rank == sv.len() || sv[rank] == 0.0 {
        f64::INFINITY
    } else {
        sv[rank - 1] / sv[rank]
    };
    RankReport {
        rank,
        tolerance,
        singular_values: sv,
        gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn identity_has_full_rank() {
        assert_eq!(numerical_rank(&DMatrix::identity(5, 5), None), 5);
    }

    #[test]
    fn outer_product_has_rank_one() {
        let u = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let v = DVector::from_vec(vec![3.0, 1.0, 4.0, -1.0]);
        let m = &u * v.transpose();
        let report = rank_report(&m, None);
        assert_eq!(report.rank, 1);
        assert!(report.gap > 1e12);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(numerical_rank(&DMatrix::zeros(3, 3), None), 0);
    }

    #[test]
    fn explicit_tolerance() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-3, 1e-9]));
        assert_eq!(numerical_rank(&m, Some(1e-6)), 2);
        assert_eq!(numerical_rank(&m, None), 3);
    }
}
