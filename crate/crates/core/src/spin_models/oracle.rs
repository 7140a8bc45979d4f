use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::accessible::{initial_string, measured_string};
use super::model::structure_constant_model;
use super::spec::HamiltonianSpec;
use crate::error::{Error, Result};

/// Largest register the density-matrix oracle accepts.
pub const MAX_ORACLE_QUBITS: usize = 4;

/// Dense Hamiltonian `sum_m h_m P_m`.
pub fn hamiltonian_matrix(spec: &HamiltonianSpec) -> DMatrix<Complex64> {
    let d = 1usize << spec.qubits();
    let mut h = DMatrix::zeros(d, d);
    for (string, coeff) in spec.pauli_coefficients(&spec.theta) {
        h += string.to_matrix() * Complex64::new(coeff, 0.0);
    }
    h
}

/// `y(t)` from exact Liouville-von Neumann evolution of
/// `rho_0 = (I + X_1) / 2^N`, expressed in the canonical output convention.
pub fn quantum_oracle_trace(spec: &HamiltonianSpec, times: &[f64]) -> Result<Vec<f64>> {
    spec.validate()?;
    let qubits = spec.qubits();
    if qubits > MAX_ORACLE_QUBITS {
        return Err(Error::Resource(format!(
            "density-matrix oracle limited to {MAX_ORACLE_QUBITS} qubits, spec needs {qubits}"
        )));
    }
    let output_sign = structure_constant_model(spec)?.convention.output_sign;

    let d = 1usize << qubits;
    let identity = DMatrix::<Complex64>::identity(d, d);
    let rho0 = (identity + initial_string(spec).to_matrix()) / Complex64::new(d as f64, 0.0);
    let observable = measured_string(spec).to_matrix();

    let eig = SymmetricEigen::new(hamiltonian_matrix(spec));
    let v = &eig.eigenvectors;
    let v_adj = v.adjoint();
    let o = &v_adj * observable * v;
    let r = &v_adj * rho0 * v;
    let energies = &eig.eigenvalues;

    Ok(times
        .iter()
        .map(|&t| {
            // Tr(O e^{-iHt} rho e^{iHt}) = sum_ab O_ab rho_ba e^{i(E_a - E_b)t}
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..d {
                for b in 0..d {
                    let phase = Complex64::from_polar(1.0, (energies[a] - energies[b]) * t);
                    acc += o[(a, b)] * r[(b, a)] * phase;
                }
            }
            output_sign * acc.re
        })
        .collect())
}
