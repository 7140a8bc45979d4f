//! Exact symbolic arithmetic on signed Pauli strings.
//!
//! A [`PauliString`] is a tensor product of single-qubit Paulis carrying a
//! phase in `{+1, +i, -1, -i}`. Products and commutators are computed
//! without floating point, so closure questions (such as building the
//! accessible set) are answered exactly.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-qubit Pauli letter. The declaration order fixes the
/// lexicographic order `I < X < Y < Z` used for tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `self * other = i^k * letter`; returns `(k mod 4, letter)`.
    fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
        }
    }

    fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_symbol(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Global phase `i^k` of a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    fn from_power(k: u8) -> Phase {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    fn power(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

/// Signed tensor product of single-qubit Paulis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    letters: Vec<Pauli>,
    phase: Phase,
}

/// Result of a commutator `[p, q] = coefficient * string`.
#[derive(Debug, Clone, PartialEq)]
pub struct Commutator {
    pub coefficient: Complex64,
    pub string: PauliString,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString {
            letters,
            phase: Phase::PlusOne,
        }
    }

    pub fn with_phase(letters: Vec<Pauli>, phase: Phase) -> Self {
        PauliString { letters, phase }
    }

    pub fn identity(qubits: usize) -> Self {
        PauliString::new(vec![Pauli::I; qubits])
    }

    /// String acting as `letter` on the given (0-based) qubits and as the
    /// identity elsewhere.
    pub fn from_sparse(qubits: usize, ops: &[(usize, Pauli)]) -> Self {
        let mut letters = vec![Pauli::I; qubits];
        for &(q, p) in ops {
            letters[q] = p;
        }
        PauliString::new(letters)
    }

    /// Parses a dense label such as `"ZZX"` (qubit 1 leftmost).
    pub fn parse(label: &str) -> Result<Self> {
        label
            .chars()
            .map(|c| {
                Pauli::from_symbol(c)
                    .ok_or_else(|| Error::Parse(format!("invalid Pauli letter '{c}' in '{label}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString::new)
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Copy with the phase reset to `+1`.
    pub fn unsigned(&self) -> PauliString {
        PauliString::new(self.letters.clone())
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.qubits() != other.qubits() {
            return Err(Error::Dimension(format!(
                "Pauli strings act on {} and {} qubits",
                self.qubits(),
                other.qubits()
            )));
        }
        Ok(())
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        self.check_len(other)?;
        let mut power = self.phase.power() + other.phase.power();
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (k, p) = a.mul(b);
                power += k;
                p
            })
            .collect();
        Ok(PauliString::with_phase(letters, Phase::from_power(power)))
    }

    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a.anticommutes(b))
            .count();
        Ok(anti % 2 == 0)
    }

    /// `[self, other] = c * r` with `r` carrying phase `+1`. Commuting
    /// strings give `c = 0` and `r = identity`.
    pub fn commutator(&self, other: &PauliString) -> Result<Commutator> {
        if self.commutes_with(other)? {
            return Ok(Commutator {
                coefficient: Complex64::new(0.0, 0.0),
                string: PauliString::identity(self.qubits()),
            });
        }
        // Anticommuting: pq - qp = 2 pq.
        let prod = self.mul(other)?;
        Ok(Commutator {
            coefficient: prod.phase.to_complex() * 2.0,
            string: prod.unsigned(),
        })
    }

    /// Dense `2^N x 2^N` matrix, qubit 1 being the most significant factor.
    pub fn to_matrix(&self) -> nalgebra::DMatrix<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let mut m = nalgebra::DMatrix::from_element(1, 1, self.phase.to_complex());
        for &p in &self.letters {
            let single = match p {
                Pauli::I => nalgebra::DMatrix::from_row_slice(2, 2, &[one, zero, zero, one]),
                Pauli::X => nalgebra::DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
                Pauli::Y => nalgebra::DMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]),
                Pauli::Z => nalgebra::DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
            };
            m = m.kronecker(&single);
        }
        m
    }
}

impl fmt::Display for PauliString {
    /// Sparse label such as `Z1Y2`, or `I` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            Phase::PlusOne => "",
            Phase::PlusI => "i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        };
        write!(f, "{sign}")?;
        if self.is_identity() {
            return write!(f, "I");
        }
        for (q, p) in self.letters.iter().enumerate() {
            if *p != Pauli::I {
                write!(f, "{}{}", p.symbol(), q + 1)?;
            }
        }
        Ok(())
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.letters
            .cmp(&other.letters)
            .then(self.phase.power().cmp(&other.phase.power()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_commutator() {
        let x = PauliString::parse("XI").unwrap();
        let z = PauliString::parse("ZI").unwrap();
        let r = x.commutator(&z).unwrap();
        assert_eq!(r.coefficient, c(0.0, -2.0));
        assert_eq!(r.string, PauliString::parse("YI").unwrap());
    }

    #[test]
    fn disjoint_supports_commute() {
        let x = PauliString::parse("XI").unwrap();
        let z = PauliString::parse("IZ").unwrap();
        let r = x.commutator(&z).unwrap();
        assert_eq!(r.coefficient, c(0.0, 0.0));
        assert!(r.string.is_identity());
    }

    #[test]
    fn two_qubit_commutator() {
        let yy = PauliString::parse("YY").unwrap();
        let x = PauliString::parse("XI").unwrap();
        let r = yy.commutator(&x).unwrap();
        assert_eq!(r.coefficient, c(0.0, -2.0));
        assert_eq!(r.string, PauliString::parse("ZY").unwrap());
    }

    #[test]
    fn mismatched_lengths() {
        let a = PauliString::parse("X").unwrap();
        let b = PauliString::parse("XX").unwrap();
        assert!(matches!(a.commutator(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn display_is_sparse() {
        assert_eq!(PauliString::parse("ZZX").unwrap().to_string(), "Z1Z2X3");
        assert_eq!(PauliString::identity(3).to_string(), "I");
    }

    #[test]
    fn identity_is_unit() {
        let p = PauliString::with_phase(PauliString::parse("XYZ").unwrap().letters, Phase::MinusI);
        let id = PauliString::identity(3);
        assert_eq!(id.mul(&p).unwrap(), p);
        assert_eq!(p.mul(&id).unwrap(), p);
    }
}
