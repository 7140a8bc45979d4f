use serde::{Deserialize, Serialize};

use super::spec::{HamiltonianSpec, Measurement};
use crate::error::Result;
use crate::pauli::{Pauli, PauliString};

/// Commutator-closed set of observables reachable from the probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessibleSet {
    pub elements: Vec<PauliString>,
    /// Iteration at which each element first appeared.
    pub generations: Vec<usize>,
}

impl AccessibleSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, s: &PauliString) -> Option<usize> {
        self.elements
            .iter()
            .position(|e| e.letters() == s.letters())
    }

    /// Whether `{set, terms} ⊆ set`.
    pub fn is_closed(elements: &[PauliString], terms: &[PauliString]) -> Result<bool> {
        for g in elements {
            for h in terms {
                let c = g.commutator(h)?;
                if c.coefficient.norm() != 0.0
                    && !elements.iter().any(|e| e.letters() == c.string.letters())
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Basis string of the measured observable.
pub fn measured_string(spec: &HamiltonianSpec) -> PauliString {
    let letter = match spec.measurement {
        Measurement::X1 => Pauli::X,
        Measurement::Y1 => Pauli::Y,
    };
    PauliString::from_sparse(spec.qubits(), &[(0, letter)])
}

/// Basis string of the prepared probe state `X_1`.
pub fn initial_string(spec: &HamiltonianSpec) -> PauliString {
    PauliString::from_sparse(spec.qubits(), &[(0, Pauli::X)])
}

/// Iterates `G_i = {G_{i-1}, L} ∪ G_{i-1}` from `G_0 = {measured}` to its
/// fixed point. Elements are ordered by generation, ties broken
/// lexicographically (`I < X < Y < Z`, qubit 1 first).
pub fn accessible_set(spec: &HamiltonianSpec) -> Result<AccessibleSet> {
    spec.validate()?;
    let mut terms: Vec<PauliString> = spec.terms().into_iter().map(|t| t.string).collect();
    terms.sort();
    terms.dedup();

    let mut generations = vec![0];
    let mut elements = vec![measured_string(spec)];
    let mut frontier_start = 0;
    let mut generation = 0;
    loop {
        generation += 1;
        let mut fresh: Vec<PauliString> = Vec::new();
        for g in &elements[frontier_start..] {
            for h in &terms {
                let c = g.commutator(h)?;
                if c.coefficient.norm() == 0.0 {
                    continue;
                }
                let s = c.string;
                if !elements.iter().any(|e| e.letters() == s.letters())
                    && !fresh.iter().any(|e| e.letters() == s.letters())
                {
                    fresh.push(s);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        fresh.sort();
        frontier_start = elements.len();
        generations.extend(std::iter::repeat_n(generation, fresh.len()));
        elements.extend(fresh);
    }
    Ok(AccessibleSet {
        elements,
        generations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_models::spec::Family;

    fn labels(set: &AccessibleSet) -> Vec<String> {
        set.elements.iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn five_qubit_chain() {
        let spec = HamiltonianSpec::new(
            Family::ExchangeNoField,
            vec![0.1, 1.5, -0.8, 3.1],
            Measurement::X1,
        )
        .unwrap();
        let set = accessible_set(&spec).unwrap();
        assert_eq!(
            labels(&set),
            ["X1", "Z1Y2", "Z1Z2X3", "Z1Z2Z3Y4", "Z1Z2Z3Z4X5"]
        );
        assert_eq!(set.generations, [0, 1, 2, 3, 4]);
    }

    #[test]
    fn two_qubit_chain() {
        let spec =
            HamiltonianSpec::new(Family::ExchangeNoField, vec![0.7], Measurement::X1).unwrap();
        assert_eq!(labels(&accessible_set(&spec).unwrap()), ["X1", "Z1Y2"]);
    }

    #[test]
    fn two_qubit_field_model() {
        let spec = HamiltonianSpec::new(
            Family::ExchangeWithField,
            vec![1.0, 0.5, -0.3],
            Measurement::X1,
        )
        .unwrap();
        let set = accessible_set(&spec).unwrap();
        assert_eq!(labels(&set), ["X1", "Y1", "Z1Y2", "Z1X2"]);
        assert_eq!(set.generations, [0, 1, 1, 2]);
    }

    #[test]
    fn field_model_measured_along_y() {
        let spec = HamiltonianSpec::new(
            Family::ExchangeWithField,
            vec![1.0, 0.5, -0.3],
            Measurement::Y1,
        )
        .unwrap();
        let set = accessible_set(&spec).unwrap();
        assert_eq!(labels(&set), ["Y1", "X1", "Z1X2", "Z1Y2"]);
        assert_eq!(set.generations, [0, 1, 1, 2]);
        assert_eq!(set.position(&initial_string(&spec)), Some(1));
    }

    #[test]
    fn dimension_law() {
        for n in 1..=6 {
            let spec = HamiltonianSpec::new(Family::ExchangeNoField, vec![1.0; n], Measurement::X1)
                .unwrap();
            assert_eq!(accessible_set(&spec).unwrap().len(), n + 1);
        }
        for n in [1, 3, 5, 7] {
            for m in [Measurement::X1, Measurement::Y1] {
                let spec =
                    HamiltonianSpec::new(Family::ExchangeWithField, vec![1.0; n], m).unwrap();
                assert_eq!(accessible_set(&spec).unwrap().len(), n + 1);
            }
        }
    }

    #[test]
    fn last_generation_is_needed() {
        for spec in [
            HamiltonianSpec::new(Family::ExchangeNoField, vec![1.0; 4], Measurement::X1).unwrap(),
            HamiltonianSpec::new(Family::ExchangeWithField, vec![1.0; 5], Measurement::X1).unwrap(),
        ] {
            let set = accessible_set(&spec).unwrap();
            let terms: Vec<_> = spec.terms().into_iter().map(|t| t.string).collect();
            assert!(AccessibleSet::is_closed(&set.elements, &terms).unwrap());
            let last = *set.generations.last().unwrap();
            let truncated: Vec<_> = set
                .elements
                .iter()
                .zip(&set.generations)
                .filter(|(_, &g)| g < last)
                .map(|(e, _)| e.clone())
                .collect();
            assert!(!AccessibleSet::is_closed(&truncated, &terms).unwrap());
        }
    }
}
