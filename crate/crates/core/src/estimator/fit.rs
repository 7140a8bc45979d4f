//! Truncated Taylor fit of a single probe trace.
//!
//! `y(p dt) = CB + sum_{r=1}^{q} (p dt)^r / r! * psi_r + tail`, with
//! `psi_1 = C A B` the probed entry. The column space of the monomial design
//! `L[p, r] = (p dt)^r / r!` equals `{t g(t) : deg g < q}`, which is fitted
//! in the Chebyshev basis `t_p T_r(2 t_p / T - 1)` (`T = N dt`). Both bases
//! give the same least-squares solution; the Chebyshev one stays well
//! conditioned where the monomial one does not.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::config::DataTrace;
use crate::error::{Error, Result};

/// Largest accepted condition number of the fitting basis.
pub const FIT_CONDITION_LIMIT: f64 = 1e12;

/// Monomial design `L[p-1, r-1] = (p dt)^r / r!`, `p = 1..N`, `r = 1..q`.
pub fn design_matrix(n: usize, dt: f64, q: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, q, |p, r| {
        let t = (p + 1) as f64 * dt;
        (1..=r + 1).fold(1.0, |acc, k| acc * t / k as f64)
    })
}

/// Chebyshev values `T_0(x) .. T_{q-1}(x)`.
fn chebyshev_row(x: f64, q: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(q);
    for r in 0..q {
        row.push(match r {
            0 => 1.0,
            1 => x,
            _ => 2.0 * x * row[r - 1] - row[r - 2],
        });
    }
    row
}

/// Fitting basis `t_p T_r(2 t_p / T - 1)`.
pub fn chebyshev_design(n: usize, dt: f64, q: usize) -> DMatrix<f64> {
    let span = n as f64 * dt;
    let mut v = DMatrix::zeros(n, q);
    for p in 0..n {
        let t = (p + 1) as f64 * dt;
        for (r, value) in chebyshev_row(2.0 * t / span - 1.0, q)
            .into_iter()
            .enumerate()
        {
            v[(p, r)] = t * value;
        }
    }
    v
}

/// Coefficients of the derivative of a Chebyshev series (in `x`).
fn chebyshev_derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n - 1];
    for k in (1..n).rev() {
        let next = if k + 1 < n - 1 { d[k + 1] } else { 0.0 };
        d[k - 1] = next + 2.0 * k as f64 * c[k];
    }
    d[0] *= 0.5;
    d
}

/// Value of a Chebyshev series at `x = -1`.
fn at_minus_one(c: &[f64]) -> f64 {
    c.iter()
        .enumerate()
        .map(|(r, v)| if r % 2 == 0 { *v } else { -*v })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryFit {
    /// `psi_1 .. psi_q`.
    pub psi_hat: Vec<f64>,
    /// `psi_1`, the estimate of the probed entry.
    pub entry_estimate: f64,
    pub residual_norm: f64,
    /// Condition number of the fitting basis.
    pub condition: f64,
    /// `||e_1^T L^+||_2`: sensitivity of the entry estimate to data errors.
    pub amplification: f64,
}

/// Least-squares fit of `D - CB` by the order-`q` design, solved with a QR
/// factorization.
pub fn estimate_entry(trace: &DataTrace, q: usize) -> Result<EntryFit> {
    let n = trace.len();
    if q < 1 || q > n {
        return Err(Error::Conditioning {
            what: format!("Taylor design with q = {q} and N = {n}; choose q <= N"),
            condition: f64::INFINITY,
            threshold: FIT_CONDITION_LIMIT,
        });
    }
    if !(trace.dt > 0.0) {
        return Err(Error::InvalidModel(format!(
            "dt must be positive, got {}",
            trace.dt
        )));
    }
    let v = chebyshev_design(n, trace.dt, q);
    let sv = v.singular_values();
    let condition = if sv.min() > 0.0 {
        sv.max() / sv.min()
    } else {
        f64::INFINITY
    };
    if !(condition <= FIT_CONDITION_LIMIT) {
        return Err(Error::Conditioning {
            what: format!("Taylor design (N = {n}, q = {q}); reduce q or increase N dt"),
            condition,
            threshold: FIT_CONDITION_LIMIT,
        });
    }

    let d = DVector::from_iterator(n, trace.values.iter().map(|y| y - trace.offset));
    let qr = v.clone().qr();
    let (qm, r) = (qr.q(), qr.r());
    let rhs = qm.transpose() * &d;
    let coeffs = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::Conditioning {
            what: "triangular factor of the Taylor design".into(),
            condition,
            threshold: FIT_CONDITION_LIMIT,
        })?;
    let residual_norm = (&d - &v * &coeffs).norm();

    // psi_r = r * g^{(r-1)}(0), derivatives in t carry (2/T)^k.
    let span = n as f64 * trace.dt;
    let mut series: Vec<f64> = coeffs.iter().copied().collect();
    let mut psi_hat = Vec::with_capacity(q);
    let mut factor = 1.0;
    for r in 1..=q {
        psi_hat.push(r as f64 * factor * at_minus_one(&series));
        series = chebyshev_derivative(&series);
        factor *= 2.0 / span;
    }

    // e_1^T L^+ = s^T R^-1 Q^T with s_r = (-1)^r.
    let s = DVector::from_fn(q, |r, _| if r % 2 == 0 { 1.0 } else { -1.0 });
    let u = r
        .transpose()
        .solve_lower_triangular(&s)
        .expect("R nonsingular after the condition check");

    Ok(EntryFit {
        entry_estimate: psi_hat[0],
        psi_hat,
        residual_norm,
        condition,
        amplification: u.norm(),
    })
}

/// Tail estimate of the truncated Taylor series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationBound {
    /// `N ||A|| dt e`.
    pub w: f64,
    /// `1 + max(floor(w), q)`.
    pub z: usize,
    pub q: usize,
    pub bound: f64,
}

/// `(2 pi (q+1))^{-1/2} [sum_{r=q+1}^{z-1} (w/r)^r + (w/z)^z / (1 - w/z)]`
/// with `||A||` the Frobenius norm.
pub fn truncation_bound(norm_a: f64, dt: f64, n: usize, q: usize) -> TruncationBound {
    let w = n as f64 * norm_a * dt * std::f64::consts::E;
    let z = 1 + (w.floor() as usize).max(q);
    let term = |r: usize| -> f64 {
        if w == 0.0 {
            0.0
        } else {
            (r as f64 * (w / r as f64).ln()).exp()
        }
    };
    let partial: f64 = (q + 1..z).map(term).sum();
    let ratio = w / z as f64;
    let tail = term(z) / (1.0 - ratio);
    let bound = (partial + tail) / (2.0 * std::f64::consts::PI * (q + 1) as f64).sqrt();
    TruncationBound { w, z, q, bound }
}

/// Bound on `|psi_1 - A_jk|` from the truncation tail alone:
/// every sample's tail is at most `bound`, so the fitted entry moves by at
/// most `amplification * sqrt(N) * bound`.
pub fn entry_error_bound(fit: &EntryFit, tb: &TruncationBound, n: usize) -> f64 {
    fit.amplification * (n as f64).sqrt() * tb.bound
}
