//! Constructive counterexample for the field chain measured along `X_1`.
//!
//! With `Abar = P E P^T`, flipping the sign of one eigenvalue gives
//! `Z = P E I_k P^T` with `Z^2 = Abar^2`, so `Z` reproduces every Markov
//! parameter of the block system. Orthogonal blocks acting on coordinates
//! `2..m` then bring `Z` back to symmetric tridiagonal form `Lbar` without
//! touching `e_1`, and the new parameters are read off `Lbar`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::sta::{magnitude_gap, output_equivalence_distance};
use crate::error::{Error, Result};
use crate::spin_models::{abar_from_theta, theta_from_abar, Family, HamiltonianSpec, Measurement};

pub const ORTHOGONALITY_TOL: f64 = 1e-10;
pub const MARKOV_TOL: f64 = 1e-8;
pub const MAGNITUDE_GAP_TOL: f64 = 1e-6;
/// Magnitude below which an eigenvector entry or coupling counts as zero.
pub const SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Lemma17Selection {
    /// 1-based index of the flipped eigenvalue.
    pub k: usize,
    pub p: DMatrix<f64>,
    /// Eigenvalues in ascending order.
    pub e: DVector<f64>,
    /// `(P E I_k P^T)_11`.
    pub z11: f64,
}

/// Ascending eigen-decomposition of a symmetric matrix.
pub fn sorted_eigen(a: &DMatrix<f64>, ascending: bool) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(a.clone());
    let mut idx: Vec<usize> = (0..a.nrows()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    if !ascending {
        idx.reverse();
    }
    let values = DVector::from_iterator(idx.len(), idx.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_columns(
        &idx.iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Smallest `k` for which flipping eigenvalue `k` changes `|Abar_11|`.
pub fn lemma17_select_k(abar: &DMatrix<f64>) -> Result<Lemma17Selection> {
    let m = abar.nrows();
    if abar.ncols() != m {
        return Err(Error::Dimension(format!("Abar is {}x{}", m, abar.ncols())));
    }
    if m < 2 {
        return Err(Error::Atypical("Abar must be at least 2x2".into()));
    }
    if (abar - abar.transpose()).amax() > SUPPORT_TOL * abar.amax().max(1.0) {
        return Err(Error::InvalidModel("Abar is not symmetric".into()));
    }
    for i in 0..m - 1 {
        if abar[(i, i + 1)].abs() <= SUPPORT_TOL {
            return Err(Error::Atypical(format!(
                "coupling Abar[{},{}] vanishes",
                i + 1,
                i + 2
            )));
        }
    }
    let (e, p) = sorted_eigen(abar, true);
    let support = (0..m).filter(|&k| p[(0, k)].abs() > SUPPORT_TOL).count();
    if support < 2 {
        return Err(Error::Atypical(format!(
            "first eigenvector row has {support} nonzero entries"
        )));
    }
    let theta1 = abar[(0, 0)];
    for k in 0..m {
        let z11 = theta1 - 2.0 * e[k] * p[(0, k)] * p[(0, k)];
        if (theta1.abs() - z11.abs()).abs() > MAGNITUDE_GAP_TOL {
            return Ok(Lemma17Selection {
                k: k + 1,
                p,
                e,
                z11,
            });
        }
    }
    Err(Error::Atypical(
        "no eigenvalue flip changes |theta_1|".into(),
    ))
}

/// Data of the orthogonal construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    /// 1-based index of the flipped eigenvalue.
    pub k: usize,
    #[serde(with = "crate::serde_rows")]
    pub p: DMatrix<f64>,
    pub e: Vec<f64>,
    #[serde(with = "crate::serde_rows::many")]
    pub n_sequence: Vec<DMatrix<f64>>,
    #[serde(with = "crate::serde_rows")]
    pub m: DMatrix<f64>,
    #[serde(with = "crate::serde_rows")]
    pub lbar: DMatrix<f64>,
    pub support_tol: f64,
}

/// Alternative parameters producing the same output as `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleCertificate {
    pub family: Family,
    pub measurement: Measurement,
    pub theta: Vec<f64>,
    pub theta_prime: Vec<f64>,
    pub markov_distance: f64,
    pub magnitude_gap: f64,
    /// Present for the constructive route; absent for search results.
    pub construction: Option<Construction>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateCheck {
    pub orthogonality_error: f64,
    pub magnitude_gap: f64,
    pub markov_distance: f64,
}

impl CertificateCheck {
    pub fn passes(&self) -> bool {
        self.orthogonality_error <= ORTHOGONALITY_TOL
            && self.magnitude_gap >= MAGNITUDE_GAP_TOL
            && self.markov_distance <= MARKOV_TOL
    }
}

fn orthogonality_error(q: &DMatrix<f64>) -> f64 {
    (q.transpose() * q - DMatrix::identity(q.ncols(), q.ncols())).amax()
}

impl CounterexampleCertificate {
    /// Recomputes every invariant from the stored parameters and matrices.
    pub fn check(&self) -> Result<CertificateCheck> {
        let spec = HamiltonianSpec::new(self.family, self.theta.clone(), self.measurement)?;
        let markov_distance = output_equivalence_distance(&spec, &self.theta, &self.theta_prime)?;
        let orthogonality_error = self.construction.as_ref().map_or(0.0, |c| {
            std::iter::once(&c.p)
                .chain(c.n_sequence.iter())
                .chain(std::iter::once(&c.m))
                .map(orthogonality_error)
                .fold(0.0, f64::max)
        });
        Ok(CertificateCheck {
            orthogonality_error,
            magnitude_gap: magnitude_gap(&self.theta, &self.theta_prime),
            markov_distance,
        })
    }

    pub fn validate(&self) -> Result<CertificateCheck> {
        let check = self.check()?;
        if check.passes() {
            Ok(check)
        } else {
            Err(Error::InvalidModel(format!(
                "certificate fails validation: orthogonality {:e}, gap {:e}, Markov distance {:e}",
                check.orthogonality_error, check.magnitude_gap, check.markov_distance
            )))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

fn embed(block: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
    let offset = m - block.nrows();
    let mut out = DMatrix::identity(m, m);
    out.view_mut((offset, offset), block.shape())
        .copy_from(block);
    out
}

/// Builds `theta'` for the field chain measured along `X_1`.
pub fn theorem2_counterexample(theta: &[f64]) -> Result<CounterexampleCertificate> {
    let n = theta.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidModel(format!(
            "counterexample needs an odd parameter count of at least 3, got {n}"
        )));
    }
    let spec = HamiltonianSpec::new(Family::ExchangeWithField, theta.to_vec(), Measurement::X1)?;
    let abar = abar_from_theta(theta)?;
    let m = abar.nrows();
    let sel = lemma17_select_k(&abar)?;

    let mut flipped = sel.e.clone();
    flipped[sel.k - 1] = -flipped[sel.k - 1];
    let mut z = symmetrize(&(&sel.p * DMatrix::from_diagonal(&flipped) * sel.p.transpose()));

    let mut total = DMatrix::identity(m, m);
    let mut n_sequence = Vec::new();
    for s in 1..m.saturating_sub(1) {
        let j = z.view((s - 1, s), (1, m - s)).into_owned();
        let gram = j.transpose() * &j;
        let (_, u) = sorted_eigen(&gram, false);
        let block = u.transpose();
        let full = embed(&block, m);
        z = symmetrize(&(&full * &z * full.transpose()));
        total = &full * total;
        n_sequence.push(block);
    }

    let scale = abar.amax().max(1.0);
    for i in 0..m {
        for j in 0..m {
            if i.abs_diff(j) > 1 && z[(i, j)].abs() > 1e-9 * scale {
                return Err(Error::InvalidModel(format!(
                    "reduction left entry ({}, {}) = {:e}",
                    i + 1,
                    j + 1,
                    z[(i, j)]
                )));
            }
        }
    }

    let mut flip = DVector::from_element(m, 1.0);
    flip[sel.k - 1] = -1.0;
    let m_mat = &total * &sel.p * DMatrix::from_diagonal(&flip) * sel.p.transpose();
    let theta_prime = theta_from_abar(&z);

    let certificate = CounterexampleCertificate {
        family: spec.family,
        measurement: spec.measurement,
        markov_distance: output_equivalence_distance(&spec, theta, &theta_prime)?,
        magnitude_gap: magnitude_gap(theta, &theta_prime),
        theta: theta.to_vec(),
        theta_prime,
        construction: Some(Construction {
            k: sel.k,
            p: sel.p,
            e: sel.e.iter().copied().collect(),
            n_sequence,
            m: m_mat,
            lbar: z,
            support_tol: SUPPORT_TOL,
        }),
    };
    certificate.validate()?;
    Ok(certificate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_selection() {
        let abar = DMatrix::from_row_slice(2, 2, &[1.0, -0.7, -0.7, 0.5]);
        let sel = lemma17_select_k(&abar).unwrap();
        assert!(sel.k == 1 || sel.k == 2);
        assert!(sel.e[0] <= sel.e[1]);
    }

    #[test]
    fn diagonal_abar_is_atypical() {
        let abar = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]);
        assert!(matches!(lemma17_select_k(&abar), Err(Error::Atypical(_))));
    }

    #[test]
    fn smallest_case_has_no_blocks() {
        let cert = theorem2_counterexample(&[1.0, 0.7, -0.5]).unwrap();
        let c = cert.construction.as_ref().unwrap();
        assert!(c.n_sequence.is_empty());
        assert!((cert.theta_prime[0].abs() - 1.0).abs() > 1e-6);
        assert!(cert.markov_distance <= 1e-8);
    }

    #[test]
    fn five_parameters_use_one_block() {
        let cert = theorem2_counterexample(&[0.3, -1.2, 0.8, 0.6, -0.4]).unwrap();
        let c = cert.construction.as_ref().unwrap();
        assert_eq!(c.n_sequence.len(), 1);
        assert!((c.lbar[(0, 2)]).abs() < 1e-9);
        let sel = lemma17_select_k(&abar_from_theta(&cert.theta).unwrap()).unwrap();
        assert!((cert.theta_prime[0].abs() - sel.z11.abs()).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let cert = theorem2_counterexample(&[1.0, 0.7, -0.5]).unwrap();
        let back = CounterexampleCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        assert!(back.validate().is_ok());
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut cert = theorem2_counterexample(&[1.0, 0.7, -0.5]).unwrap();
        cert.theta_prime[1] += 1e-3;
        assert!(cert.validate().is_err());
    }
}
