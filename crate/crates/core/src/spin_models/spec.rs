use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Exchange-chain Hamiltonian families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `H = sum_i (-1)^i theta_i / 2 (X_i X_{i+1} + Y_i Y_{i+1})` on `n + 1` qubits.
    ExchangeNoField,
    /// Adds `theta_{2i-1}/2 Z_i` fields; couplings carry the even parameters.
    /// `n` odd, `(n + 1) / 2` qubits.
    ExchangeWithField,
}

/// Observable measured on the probe qubit (always prepared along `X_1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measurement {
    X1,
    Y1,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::ExchangeNoField => "exchange_no_field",
            Family::ExchangeWithField => "exchange_with_field",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "exchange_no_field" | "exchangenofield" => Ok(Family::ExchangeNoField),
            "exchange_with_field" | "exchangewithfield" => Ok(Family::ExchangeWithField),
            other => Err(Error::Parse(format!("unknown family '{other}'"))),
        }
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measurement::X1 => "X1",
            Measurement::Y1 => "Y1",
        })
    }
}

impl FromStr for Measurement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "X1" => Ok(Measurement::X1),
            "Y1" => Ok(Measurement::Y1),
            other => Err(Error::Parse(format!("unknown measurement '{other}'"))),
        }
    }
}

/// One structural term `weight * theta[param] * string` of a Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    pub string: PauliString,
    pub param: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub family: Family,
    pub theta: Vec<f64>,
    pub measurement: Measurement,
}

impl HamiltonianSpec {
    pub fn new(family: Family, theta: Vec<f64>, measurement: Measurement) -> Result<Self> {
        let spec = HamiltonianSpec {
            family,
            theta,
            measurement,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Number of unknown parameters.
    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InvalidModel(
                "at least one parameter is required".into(),
            ));
        }
        if self.theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidModel("parameters must be finite".into()));
        }
        match (self.family, self.measurement) {
            (Family::ExchangeWithField, _) if n.is_multiple_of(2) => Err(Error::InvalidModel(
                format!("exchange_with_field needs an odd parameter count, got {n}"),
            )),
            (Family::ExchangeNoField, Measurement::Y1) => Err(Error::InvalidModel(
                "Y1 measurement is only defined for exchange_with_field".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn qubits(&self) -> usize {
        match self.family {
            Family::ExchangeNoField => self.n() + 1,
            Family::ExchangeWithField => self.n().div_ceil(2),
        }
    }

    /// Structural terms; their coefficients are `weight * theta[param]`.
    pub fn terms(&self) -> Vec<HamiltonianTerm> {
        let q = self.qubits();
        let mut terms = Vec::new();
        let coupling =
            |terms: &mut Vec<HamiltonianTerm>, site: usize, param: usize, weight: f64| {
                for p in [Pauli::X, Pauli::Y] {
                    terms.push(HamiltonianTerm {
                        string: PauliString::from_sparse(q, &[(site, p), (site + 1, p)]),
                        param,
                        weight,
                    });
                }
            };
        match self.family {
            Family::ExchangeNoField => {
                for i in 0..self.n() {
                    // Parameter index i+1 carries (-1)^(i+1) / 2.
                    let weight = if i % 2 == 0 { -0.5 } else { 0.5 };
                    coupling(&mut terms, i, i, weight);
                }
            }
            Family::ExchangeWithField => {
                for site in 0..q {
                    terms.push(HamiltonianTerm {
                        string: PauliString::from_sparse(q, &[(site, Pauli::Z)]),
                        param: 2 * site,
                        weight: 0.5,
                    });
                }
                for site in 0..q.saturating_sub(1) {
                    coupling(&mut terms, site, 2 * site + 1, 0.5);
                }
            }
        }
        terms
    }

    /// Pauli decomposition of `H` for the given parameters, merged by string.
    pub fn pauli_coefficients(&self, theta: &[f64]) -> Vec<(PauliString, f64)> {
        let mut out: Vec<(PauliString, f64)> = Vec::new();
        for term in self.terms() {
            let value = term.weight * theta[term.param];
            match out.iter_mut().find(|(s, _)| *s == term.string) {
                Some(entry) => entry.1 += value,
                None => out.push((term.string, value)),
            }
        }
        out
    }

    /// Frobenius norm of `H(theta)`; Pauli strings are orthogonal with
    /// squared norm `2^N`.
    pub fn hamiltonian_norm(&self, theta: &[f64]) -> f64 {
        let scale = (1u64 << self.qubits()) as f64;
        (self
            .pauli_coefficients(theta)
            .iter()
            .map(|(_, c)| c * c)
            .sum::<f64>()
            * scale)
            .sqrt()
    }

    /// `||H(theta_hat) - H(theta)||_F / ||H(theta)||_F`.
    pub fn relative_hamiltonian_error(&self, theta_hat: &[f64]) -> f64 {
        let diff: Vec<f64> = theta_hat
            .iter()
            .zip(&self.theta)
            .map(|(a, b)| a - b)
            .collect();
        self.hamiltonian_norm(&diff) / self.hamiltonian_norm(&self.theta)
    }

    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        HamiltonianSpec::new(self.family, theta, self.measurement)
    }
}
