use nalgebra::DMatrix;

use crate::linsys::{kalman_decompose, DecompositionResult, LinearSystem};
use crate::spin_models::ParamEntry;

/// Occurrence threshold for a parameter inside the transformed minimal block.
pub const OCCURRENCE_TOL: f64 = 1e-9;

/// Indices (0-based) of parameters absent from the minimal subsystem.
///
/// With orthogonal `T` from the Kalman decomposition,
/// `T A T^T = sum_i theta_i T G_i T^T` where `G_i` marks the entries carrying
/// `theta_i`. A parameter occurs in the minimal block iff the corresponding
/// block of `T G_i T^T` is nonzero.
pub fn criterion1_unidentifiable_params(
    sys: &LinearSystem,
    locations: &[Vec<ParamEntry>],
) -> Vec<usize> {
    let dec = kalman_decompose(sys);
    criterion1_from_decomposition(&dec, locations)
}

pub fn criterion1_from_decomposition(
    dec: &DecompositionResult,
    locations: &[Vec<ParamEntry>],
) -> Vec<usize> {
    let n = dec.transform.nrows();
    let k = dec.minimal_dim;
    let t = &dec.transform;
    locations
        .iter()
        .enumerate()
        .filter(|(_, entries)| {
            let mut g = DMatrix::zeros(n, n);
            for e in entries.iter() {
                g[(e.row, e.col)] += e.coeff;
            }
            let moved = t * g * t.transpose();
            moved.view((0, 0), (k, k)).norm() <= OCCURRENCE_TOL
        })
        .map(|(i, _)| i)
        .collect()
}
