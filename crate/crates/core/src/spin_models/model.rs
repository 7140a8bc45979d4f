use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector, RowDVector};
use serde::{Deserialize, Serialize};

use super::accessible::{accessible_set, initial_string, measured_string, AccessibleSet};
use super::spec::{Family, HamiltonianSpec, Measurement};
use crate::error::{Error, Result};
use crate::linsys::{permutation_matrix, unit, LinearSystem};
use crate::pauli::{Pauli, PauliString};

/// One occurrence of a parameter in `A`: `A[row, col] += coeff * theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamEntry {
    pub row: usize,
    pub col: usize,
    pub coeff: f64,
}

/// Occurrences of every parameter in the canonical system matrix.
pub fn param_locations(spec: &HamiltonianSpec) -> Vec<Vec<ParamEntry>> {
    let n = spec.n();
    let pair = |r: usize, c: usize, s: f64| {
        [
            ParamEntry {
                row: r,
                col: c,
                coeff: s,
            },
            ParamEntry {
                row: c,
                col: r,
                coeff: -s,
            },
        ]
    };
    match spec.family {
        Family::ExchangeNoField => (0..n).map(|i| pair(i, i + 1, 1.0).to_vec()).collect(),
        Family::ExchangeWithField => (0..n)
            .map(|p| {
                // Field on site j links (2j, 2j+1); coupling between sites j and
                // j+1 links (2j, 2j+3) and (2j+1, 2j+2) with opposite signs.
                if p % 2 == 0 {
                    let j = p / 2;
                    pair(2 * j, 2 * j + 1, 1.0).to_vec()
                } else {
                    let j = p / 2;
                    let mut v = pair(2 * j + 1, 2 * j + 2, 1.0).to_vec();
                    v.extend(pair(2 * j, 2 * j + 3, -1.0));
                    v
                }
            })
            .collect(),
    }
}

/// Canonical system matrix of `spec.family` at arbitrary parameters.
pub fn system_matrix(spec: &HamiltonianSpec, theta: &[f64]) -> Result<DMatrix<f64>> {
    if theta.len() != spec.n() {
        return Err(Error::Dimension(format!(
            "expected {} parameters, got {}",
            spec.n(),
            theta.len()
        )));
    }
    let dim = spec.n() + 1;
    let mut a = DMatrix::zeros(dim, dim);
    for (p, entries) in param_locations(spec).iter().enumerate() {
        for e in entries {
            a[(e.row, e.col)] += e.coeff * theta[p];
        }
    }
    Ok(a)
}

fn output_row(spec: &HamiltonianSpec) -> RowDVector<f64> {
    let dim = spec.n() + 1;
    match spec.measurement {
        Measurement::X1 => unit(dim, 0).transpose(),
        Measurement::Y1 => unit(dim, 1).transpose(),
    }
}

/// Compressed model in canonical coordinates: `B = e_1`, `C = e_1^T` for
/// `X1`, `C = e_2^T` for `Y1`, `D = 0`.
pub fn build_linear_model(spec: &HamiltonianSpec) -> Result<LinearSystem> {
    build_linear_model_with(spec, &spec.theta)
}

/// Same structure as [`build_linear_model`] with replacement parameters.
pub fn build_linear_model_with(spec: &HamiltonianSpec, theta: &[f64]) -> Result<LinearSystem> {
    spec.validate()?;
    let a = system_matrix(spec, theta)?;
    LinearSystem::new(a, unit(spec.n() + 1, 0), output_row(spec))
}

/// Basis string of canonical coordinate `k` (0-based).
pub fn canonical_string(spec: &HamiltonianSpec, k: usize) -> PauliString {
    let q = spec.qubits();
    let (site, letter) = match spec.family {
        Family::ExchangeNoField => (
            k,
            if k.is_multiple_of(2) {
                Pauli::X
            } else {
                Pauli::Y
            },
        ),
        Family::ExchangeWithField => (
            k / 2,
            if k.is_multiple_of(2) {
                Pauli::X
            } else {
                Pauli::Y
            },
        ),
    };
    let mut ops: Vec<(usize, Pauli)> = (0..site).map(|s| (s, Pauli::Z)).collect();
    ops.push((site, letter));
    PauliString::from_sparse(q, &ops)
}

/// Relation between the structure-constant coordinates and the canonical
/// pattern. With `x_k = Tr(H_k rho)` and `H_k = basis_scale * P_k`, the
/// canonical state is `x_canon[i] = signs[i] * x[permutation[i]]` and every
/// canonical entry equals `constant` times the transformed structure-constant
/// entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConvention {
    pub basis_scale: f64,
    pub permutation: Vec<usize>,
    pub signs: Vec<f64>,
    pub constant: f64,
    /// Sign relating the canonical output to `Tr(O rho)`.
    pub output_sign: f64,
    pub sign_convention: String,
}

#[derive(Debug, Clone)]
pub struct StructureConstantModel {
    pub accessible: AccessibleSet,
    /// System in accessible-set coordinates.
    pub system: LinearSystem,
    pub convention: NormalizationConvention,
}

impl StructureConstantModel {
    /// Transformation into canonical coordinates.
    pub fn transform(&self) -> DMatrix<f64> {
        let n = self.convention.permutation.len();
        let mut s = DMatrix::zeros(n, n);
        for (i, (&p, &sign)) in self
            .convention
            .permutation
            .iter()
            .zip(&self.convention.signs)
            .enumerate()
        {
            s[(i, p)] = sign;
        }
        s
    }

    /// Structure-constant system mapped to canonical coordinates, with the
    /// calibration constant applied.
    pub fn canonical(&self) -> Result<LinearSystem> {
        let mut out = self.system.similarity_transform(&self.transform())?;
        out.a *= self.convention.constant;
        Ok(out)
    }
}

/// `A` from structure constants: `d/dt Tr(P_k rho) = -i sum_m h_m Tr([P_k, P_m] rho)`.
fn structure_constant_matrix(
    spec: &HamiltonianSpec,
    theta: &[f64],
    set: &AccessibleSet,
) -> Result<DMatrix<f64>> {
    let dim = set.len();
    let mut a = DMatrix::zeros(dim, dim);
    let hamiltonian = spec.pauli_coefficients(theta);
    for (k, pk) in set.elements.iter().enumerate() {
        for (pm, h) in &hamiltonian {
            let c = pk.commutator(pm)?;
            if c.coefficient.norm() == 0.0 {
                continue;
            }
            let r = set.position(&c.string).ok_or_else(|| {
                Error::InvalidModel(format!(
                    "commutator {} escapes the accessible set",
                    c.string
                ))
            })?;
            let value = -num_complex::Complex64::i() * c.coefficient * *h;
            if value.im != 0.0 {
                return Err(Error::InvalidModel("non-real structure constant".into()));
            }
            a[(k, r)] += value.re;
        }
    }
    Ok(a)
}

/// Builds the model from the accessible set and calibrates it against the
/// canonical pattern. Calibration uses a fixed generic parameter vector so
/// no coupling vanishes; the recovered constant must be uniform.
pub fn structure_constant_model(spec: &HamiltonianSpec) -> Result<StructureConstantModel> {
    spec.validate()?;
    let set = accessible_set(spec)?;
    let dim = spec.n() + 1;
    if set.len() != dim {
        return Err(Error::InvalidModel(format!(
            "accessible set has {} elements, expected {dim}",
            set.len()
        )));
    }
    let a = structure_constant_matrix(spec, &spec.theta, &set)?;
    let x0 = set
        .position(&initial_string(spec))
        .ok_or_else(|| Error::InvalidModel("initial state outside the accessible set".into()))?;
    let obs = set
        .position(&measured_string(spec))
        .expect("measured string seeds the set");
    let system = LinearSystem::new(a, unit(dim, x0), unit(dim, obs).transpose())?;

    let permutation: Vec<usize> = (0..dim)
        .map(|k| {
            set.position(&canonical_string(spec, k)).ok_or_else(|| {
                Error::InvalidModel(format!("{} missing", canonical_string(spec, k)))
            })
        })
        .collect::<Result<_>>()?;

    let probe: Vec<f64> = (0..spec.n())
        .map(|i| 1.0 + 0.37 * (i as f64 + 1.0))
        .collect();
    let general = structure_constant_matrix(spec, &probe, &set)?;
    let canned = system_matrix(spec, &probe)?;
    let (signs, constant) = calibrate(&general, &canned, &permutation)?;

    let output_sign = signs[permutation.iter().position(|&p| p == obs).unwrap()];
    let input_sign = signs[permutation.iter().position(|&p| p == x0).unwrap()];
    let convention = NormalizationConvention {
        basis_scale: (2f64).powf(-(spec.qubits() as f64) / 2.0),
        sign_convention: format!(
            "canonical A = {constant} * S A_sc S^T with S the signed permutation {:?}/{:?}; \
             canonical output = {output_sign} * Tr(O rho)",
            permutation, signs
        ),
        permutation,
        signs,
        constant,
        output_sign,
    };
    if input_sign != 1.0 {
        return Err(Error::InvalidModel(
            "calibration flips the initial state".into(),
        ));
    }
    Ok(StructureConstantModel {
        accessible: set,
        system,
        convention,
    })
}

/// Finds signs `s` with `canned[i][j] = constant * s_i s_j general[p_i][p_j]`
/// by propagating along nonzero entries from coordinate 0.
fn calibrate(
    general: &DMatrix<f64>,
    canned: &DMatrix<f64>,
    perm: &[usize],
) -> Result<(Vec<f64>, f64)> {
    let n = perm.len();
    let mut signs = vec![0.0; n];
    signs[0] = 1.0;
    let mut queue = VecDeque::from([0usize]);
    let mut constant: Option<f64> = None;
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            let g = general[(perm[i], perm[j])];
            let c = canned[(i, j)];
            if (g == 0.0) != (c == 0.0) {
                return Err(Error::InvalidModel(format!(
                    "zero pattern differs at canonical entry ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            if g == 0.0 {
                continue;
            }
            let ratio = c / (signs[i] * g);
            if signs[j] == 0.0 {
                let k = *constant.get_or_insert(ratio.abs());
                signs[j] = (ratio / k).signum();
                queue.push_back(j);
            }
        }
    }
    if signs.contains(&0.0) {
        return Err(Error::InvalidModel(
            "canonical coordinates are not connected".into(),
        ));
    }
    let constant = constant.unwrap_or(1.0);
    for i in 0..n {
        for j in 0..n {
            let mapped = constant * signs[i] * signs[j] * general[(perm[i], perm[j])];
            if (mapped - canned[(i, j)]).abs() > 1e-12 * canned.amax() {
                return Err(Error::InvalidModel(format!(
                    "no uniform constant maps the structure-constant entry ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok((signs, constant))
}

/// Block form `[[0, Abar], [-Abar, 0]]` of a field-model system.
#[derive(Debug, Clone)]
pub struct BlockForm {
    pub system: LinearSystem,
    /// `permutation[k]` is the canonical index placed at position `k`.
    pub permutation: Vec<usize>,
    pub abar: DMatrix<f64>,
}

/// Odd coordinates first, then even ones (1-based), realised as a similarity
/// transform.
pub fn rearrange_block_form(sys: &LinearSystem) -> Result<BlockForm> {
    let n = sys.dim();
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidModel(format!(
            "block form needs an even state dimension, got {n}"
        )));
    }
    let m = n / 2;
    let permutation: Vec<usize> = (0..n).step_by(2).chain((1..n).step_by(2)).collect();
    let p = permutation_matrix(&permutation)?;
    let system = sys.similarity_transform(&p)?;
    let a = &system.a;
    let top_left = a.view((0, 0), (m, m));
    let bottom_right = a.view((m, m), (m, m));
    let abar = a.view((0, m), (m, m)).into_owned();
    let lower = a.view((m, 0), (m, m)).into_owned();
    if top_left.amax() != 0.0
        || bottom_right.amax() != 0.0
        || lower != -&abar
        || abar != abar.transpose()
    {
        return Err(Error::InvalidModel(
            "system is not of exchange-with-field form".into(),
        ));
    }
    Ok(BlockForm {
        system,
        permutation,
        abar,
    })
}

/// Symmetric tridiagonal `Abar` of the field family: diagonal
/// `(theta_1, theta_3, ...)`, off-diagonal `(-theta_2, -theta_4, ...)`.
pub fn abar_from_theta(theta: &[f64]) -> Result<DMatrix<f64>> {
    let n = theta.len();
    if n.is_multiple_of(2) {
        return Err(Error::InvalidModel(format!(
            "odd parameter count required, got {n}"
        )));
    }
    let m = n.div_ceil(2);
    let mut abar = DMatrix::zeros(m, m);
    for i in 0..m {
        abar[(i, i)] = theta[2 * i];
        if i + 1 < m {
            abar[(i, i + 1)] = -theta[2 * i + 1];
            abar[(i + 1, i)] = -theta[2 * i + 1];
        }
    }
    Ok(abar)
}

/// Inverse of [`abar_from_theta`]; reads the diagonal and superdiagonal.
pub fn theta_from_abar(abar: &DMatrix<f64>) -> Vec<f64> {
    let m = abar.nrows();
    let mut theta = Vec::with_capacity(2 * m - 1);
    for i in 0..m {
        theta.push(abar[(i, i)]);
        if i + 1 < m {
            theta.push(-abar[(i, i + 1)]);
        }
    }
    theta
}

/// Output row of the block form for a measurement.
pub fn block_output_row(m: usize, measurement: Measurement) -> RowDVector<f64> {
    let v: DVector<f64> = match measurement {
        Measurement::X1 => unit(2 * m, 0),
        Measurement::Y1 => unit(2 * m, m),
    };
    v.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, theta: Vec<f64>, m: Measurement) -> HamiltonianSpec {
        HamiltonianSpec::new(family, theta, m).unwrap()
    }

    #[test]
    fn chain_pattern() {
        let s = spec(
            Family::ExchangeNoField,
            vec![0.1, 1.5, -0.8, 3.1],
            Measurement::X1,
        );
        let sys = build_linear_model(&s).unwrap();
        for i in 0..4 {
            assert_eq!(sys.a[(i, i + 1)], s.theta[i]);
            assert_eq!(sys.a[(i + 1, i)], -s.theta[i]);
        }
        assert_eq!(sys.a.iter().filter(|v| **v != 0.0).count(), 8);
        assert_eq!(&sys.a + sys.a.transpose(), DMatrix::zeros(5, 5));
    }

    #[test]
    fn field_pattern() {
        let (t1, t2, t3) = (0.9, -1.3, 0.4);
        let s = spec(Family::ExchangeWithField, vec![t1, t2, t3], Measurement::Y1);
        let sys = build_linear_model(&s).unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, t1, 0.0, -t2, -t1, 0.0, t2, 0.0, 0.0, -t2, 0.0, t3, t2, 0.0, -t3, 0.0,
            ],
        );
        assert_eq!(sys.a, expected);
        assert_eq!(sys.c, unit(4, 1).transpose());
    }

    #[test]
    fn structure_constants_reproduce_canned_patterns() {
        let cases = [
            spec(Family::ExchangeNoField, vec![0.7], Measurement::X1),
            spec(
                Family::ExchangeNoField,
                vec![0.1, 1.5, -0.8, 3.1],
                Measurement::X1,
            ),
            spec(
                Family::ExchangeWithField,
                vec![0.9, -1.3, 0.4],
                Measurement::X1,
            ),
            spec(
                Family::ExchangeWithField,
                vec![0.9, -1.3, 0.4],
                Measurement::Y1,
            ),
            spec(
                Family::ExchangeWithField,
                vec![0.2, 1.1, -0.6, 0.8, 1.7],
                Measurement::X1,
            ),
        ];
        for s in cases {
            let model = structure_constant_model(&s).unwrap();
            let canonical = model.canonical().unwrap();
            let canned = build_linear_model(&s).unwrap();
            assert_eq!(canonical.a, canned.a, "{:?}", s);
            assert_eq!(canonical.b, canned.b);
            assert_eq!(canonical.c * model.convention.output_sign, canned.c);
            assert_eq!(model.convention.constant, 1.0);
        }
    }

    #[test]
    fn block_form_of_three_parameter_model() {
        let s = spec(
            Family::ExchangeWithField,
            vec![0.9, -1.3, 0.4],
            Measurement::Y1,
        );
        let sys = build_linear_model(&s).unwrap();
        let block = rearrange_block_form(&sys).unwrap();
        assert_eq!(
            block.abar,
            DMatrix::from_row_slice(2, 2, &[0.9, 1.3, 1.3, 0.4])
        );
        assert_eq!(block.abar, abar_from_theta(&s.theta).unwrap());
        assert_eq!(block.system.b, unit(4, 0));
        assert_eq!(block.system.c, block_output_row(2, Measurement::Y1));
        assert_eq!(sys.markov_parameters(8), block.system.markov_parameters(8));
    }

    #[test]
    fn block_form_rejects_chain() {
        let s = spec(
            Family::ExchangeNoField,
            vec![0.5, 0.3, 0.2],
            Measurement::X1,
        );
        let sys = build_linear_model(&s).unwrap();
        assert!(rearrange_block_form(&sys).is_err());
    }

    #[test]
    fn abar_round_trip() {
        let theta = vec![0.2, 1.1, -0.6, 0.8, 1.7];
        assert_eq!(theta_from_abar(&abar_from_theta(&theta).unwrap()), theta);
    }
}
