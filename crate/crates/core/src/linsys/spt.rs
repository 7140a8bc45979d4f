//! Structure-preserving extraction of the minimal subsystem seen by a
//! single-entry probe `B = e_j`, `C = e_i^T`.
//!
//! The observable part is extracted first, then the same construction is
//! applied to the dual system to remove the uncontrollable part. Each stage:
//!
//! 1. `T` clears column 2 below row 2 using the pivot `A_12`;
//! 2. `U` permutes states so the leading columns of the observability basis
//!    (rows spanning `C, CA, CA^2, ...`) are independent, keeping states
//!    1 and 2 in place;
//! 3. `Q = diag(F^-1, I) [F f; 0 I]` moves to observable coordinates while
//!    leaving the leading block's second column untouched.
//!
//! Because `Q` is block upper-triangular with identity diagonal blocks the
//! leading block keeps `A_12`, `B = e_2` and `C = e_1^T`.

use nalgebra::{DMatrix, DVector};

use super::kalman::{krylov_basis, DEFAULT_KRYLOV_TOL};
use super::LinearSystem;
use crate::error::{Error, Result};

/// Entries with magnitude below `ATYPICAL_TOL * max(1, max|A|)` count as zero.
pub const ATYPICAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SptResult {
    /// Minimal system with `B = e_2, C = e_1^T` (or `B = C^T = e_1` for a
    /// diagonal probe).
    pub minimal: LinearSystem,
    /// `minimal.a[(0, 1)]`, or `minimal.a[(0, 0)]` for a diagonal probe.
    pub preserved_entry: f64,
    /// Dimension after the observability stage.
    pub observable_dim: usize,
    /// State order applied before the first stage (`order[k]` is the old index).
    pub initial_order: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Probe {
    /// Probing `A_12` with `B = e_2`, `C = e_1^T`.
    OffDiagonal,
    /// Probing `A_11` with `B = C^T = e_1`.
    Diagonal,
}

/// Reduces `sys` (which must satisfy `B = e_col`, `C = e_row^T`, 0-based) to a
/// minimal realization whose leading entry equals `A[row, col]`.
pub fn spt_extract_minimal(sys: &LinearSystem, row: usize, col: usize) -> Result<SptResult> {
    let n = sys.dim();
    if row >= n || col >= n {
        return Err(Error::Dimension(format!(
            "probe ({row},{col}) outside dimension {n}"
        )));
    }
    let expected = LinearSystem::probe(sys.a.clone(), row, col)?;
    if expected.b != sys.b || expected.c != sys.c {
        return Err(Error::InvalidModel(format!(
            "probe extraction needs B = e_{} and C = e_{}^T",
            col + 1,
            row + 1
        )));
    }
    let tol = ATYPICAL_TOL * sys.a.amax().max(1.0);

    let (probe, order) = if row != col {
        let mut order = vec![row, col];
        order.extend((0..n).filter(|&k| k != row && k != col));
        (Probe::OffDiagonal, order)
    } else {
        let mut order = vec![row];
        order.extend((0..n).filter(|&k| k != row));
        (Probe::Diagonal, order)
    };
    let reordered = sys.permute(&order)?;
    if probe == Probe::OffDiagonal && reordered.a[(0, 1)].abs() <= tol {
        return Err(Error::Atypical(format!(
            "probed entry A[{row},{col}] = {:e} is zero within tolerance",
            reordered.a[(0, 1)]
        )));
    }

    let observable = observable_stage(&reordered, probe, tol)?;
    let observable_dim = observable.dim();
    let dual = dualize(&observable, probe);
    let reduced = observable_stage(&dual, probe, tol)?;
    let minimal = dualize(&reduced, probe);

    let preserved_entry = match probe {
        Probe::OffDiagonal => minimal.a[(0, 1)],
        Probe::Diagonal => minimal.a[(0, 0)],
    };
    Ok(SptResult {
        minimal,
        preserved_entry,
        observable_dim,
        initial_order: order,
    })
}

/// Transpose the system and, for the off-diagonal probe, swap states 1 and 2
/// so the dual again has `B = e_2`, `C = e_1^T` and the same `A_12`.
fn dualize(sys: &LinearSystem, probe: Probe) -> LinearSystem {
    let n = sys.dim();
    let mut a = sys.a.transpose();
    let mut b = sys.c.transpose();
    let mut c = sys.b.transpose();
    if probe == Probe::OffDiagonal && n >= 2 {
        a.swap_rows(0, 1);
        a.swap_columns(0, 1);
        b.swap_rows(0, 1);
        c.swap_columns(0, 1);
    }
    LinearSystem { a, b, c, d: sys.d }
}

/// Observability reduction of a system already in probe position.
fn observable_stage(sys: &LinearSystem, probe: Probe, tol: f64) -> Result<LinearSystem> {
    let n = sys.dim();
    if n == 1 {
        return Ok(sys.clone());
    }
    if probe == Probe::Diagonal && sys.a.row(0).columns(1, n - 1).amax() <= tol {
        // Output only ever sees x_1: observable part is one-dimensional.
        return Ok(sys.leading_block(1));
    }
    let basis = krylov_basis(&sys.a.transpose(), &sys.c.transpose(), DEFAULT_KRYLOV_TOL);
    if basis.dim() == n {
        return Ok(sys.clone());
    }

    // T: subtract multiples of row 1 so column 2 vanishes below row 2.
    let shaped = match probe {
        Probe::OffDiagonal => {
            let pivot = sys.a[(0, 1)];
            let mut t = DMatrix::identity(n, n);
            let mut t_inv = DMatrix::identity(n, n);
            for r in 2..n {
                let factor = sys.a[(r, 1)] / pivot;
                t[(r, 0)] = -factor;
                t_inv[(r, 0)] = factor;
            }
            let mut out = sys.apply_pair(&t, &t_inv);
            for r in 2..n {
                out.a[(r, 1)] = 0.0;
            }
            out
        }
        Probe::Diagonal => sys.clone(),
    };

    let basis = krylov_basis(
        &shaped.a.transpose(),
        &shaped.c.transpose(),
        DEFAULT_KRYLOV_TOL,
    );
    let m = basis.dim();
    // Rows of E span the observable row space; first row is C = e_1^T.
    let e = basis.matrix(n).transpose();

    let pinned: &[usize] = match probe {
        Probe::OffDiagonal => &[0, 1],
        Probe::Diagonal => &[0],
    };
    let selected = select_independent_columns(&e, pinned, m, tol)?;
    let mut order = selected.clone();
    order.extend((0..n).filter(|k| !selected.contains(k)));
    let permuted = shaped.permute(&order)?;
    let e_perm = DMatrix::from_fn(m, n, |i, k| e[(i, order[k])]);

    let f_block = e_perm.columns(0, m).into_owned();
    let f_rest = e_perm.columns(m, n - m).into_owned();
    let lu = f_block.lu();
    let coupling = lu.solve(&f_rest).ok_or_else(|| Error::Conditioning {
        what: "observable coordinate block".into(),
        condition: f64::INFINITY,
        threshold: 0.0,
    })?;

    let mut q = DMatrix::identity(n, n);
    let mut q_inv = DMatrix::identity(n, n);
    q.view_mut((0, m), (m, n - m)).copy_from(&coupling);
    q_inv.view_mut((0, m), (m, n - m)).copy_from(&(-&coupling));
    let canonical = permuted.apply_pair(&q, &q_inv);

    let mut out = canonical.leading_block(m);
    // Structurally exact: first m columns of Q are identity columns and
    // the output row of E is e_1^T.
    out.c = DVector::from_fn(m, |k, _| if k == 0 { 1.0 } else { 0.0 }).transpose();
    Ok(out)
}

/// Greedy pivoted Gram-Schmidt over the columns of `e`, starting from the
/// pinned columns, until `count` independent columns are found.
fn select_independent_columns(
    e: &DMatrix<f64>,
    pinned: &[usize],
    count: usize,
    tol: f64,
) -> Result<Vec<usize>> {
    let n = e.ncols();
    let mut selected: Vec<usize> = Vec::with_capacity(count);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(count);
    let residual = |v: DVector<f64>, basis: &[DVector<f64>]| {
        let mut w = v;
        for _ in 0..2 {
            for q in basis {
                let h = q.dot(&w);
                w.axpy(-h, q, 1.0);
            }
        }
        w
    };
    for &k in pinned.iter().take(count) {
        let w = residual(e.column(k).into_owned(), &basis);
        let norm = w.norm();
        if norm <= tol.min(1e-9) {
            return Err(Error::Atypical(format!(
                "observability column {} depends on the previous pinned columns",
                k + 1
            )));
        }
        basis.push(w / norm);
        selected.push(k);
    }
    while selected.len() < count {
        let (best, w) = (0..n)
            .filter(|k| !selected.contains(k))
            .map(|k| (k, residual(e.column(k).into_owned(), &basis)))
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("fewer columns than the observable dimension");
        let norm = w.norm();
        basis.push(w / norm);
        selected.push(best);
    }
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsys::system::unit;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_probe_on_decoupled_states() {
        let a = DMatrix::from_row_slice(2, 2, &[0.4, 0.0, 0.0, -2.0]);
        let sys = LinearSystem::probe(a, 0, 0).unwrap();
        let out = spt_extract_minimal(&sys, 0, 0).unwrap();
        assert_eq!(out.minimal.dim(), 1);
        assert_relative_eq!(out.preserved_entry, 0.4);
    }

    #[test]
    fn minimal_input_is_returned_unchanged() {
        let a = DMatrix::from_row_slice(3, 3, &[0.1, 1.3, -0.2, 0.5, -0.7, 0.9, 0.3, 1.1, 0.2]);
        let sys = LinearSystem::probe(a, 0, 1).unwrap();
        let out = spt_extract_minimal(&sys, 0, 1).unwrap();
        assert_eq!(out.minimal, sys);
        assert_eq!(out.initial_order, vec![0, 1, 2]);
    }

    #[test]
    fn zero_probed_entry_is_atypical() {
        let a = DMatrix::from_row_slice(3, 3, &[0.1, 0.0, -0.2, 0.5, -0.7, 0.9, 0.3, 1.1, 0.2]);
        let sys = LinearSystem::probe(a, 0, 1).unwrap();
        assert!(matches!(
            spt_extract_minimal(&sys, 0, 1),
            Err(Error::Atypical(_))
        ));
    }

    #[test]
    fn wrong_probe_vectors_rejected() {
        let a = DMatrix::identity(2, 2);
        let sys = LinearSystem::new(a, unit(2, 0), unit(2, 0).transpose()).unwrap();
        assert!(matches!(
            spt_extract_minimal(&sys, 0, 1),
            Err(Error::InvalidModel(_))
        ));
    }
}
