use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ops::{identity, pauli_x, pauli_y, pauli_z};
use super::{CMatrix, QuantumError, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::I => identity(2),
            Pauli::X => pauli_x(),
            Pauli::Y => pauli_y(),
            Pauli::Z => pauli_z(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis, qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliObservable {
    factors: Vec<Pauli>,
}

impl PauliObservable {
    pub fn new(factors: Vec<Pauli>) -> Self {
        Self { factors }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::new(vec![Pauli::I; n_qubits])
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|&p| p == Pauli::I)
    }

    pub fn matrix(&self) -> CMatrix {
        self.factors
            .iter()
            .fold(CMatrix::from_element(1, 1, C64::new(1.0, 0.0)), |acc, p| {
                acc.kronecker(&p.matrix())
            })
    }

    /// Every Pauli string on `n_qubits`, identity first, in lexicographic
    /// `I < X < Y < Z` order.
    pub fn all(n_qubits: usize) -> Vec<PauliObservable> {
        let mut out = vec![PauliObservable::new(Vec::new())];
        for _ in 0..n_qubits {
            out = out
                .into_iter()
                .flat_map(|o| {
                    Pauli::ALL.iter().map(move |&p| {
                        let mut f = o.factors.clone();
                        f.push(p);
                        PauliObservable::new(f)
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for PauliObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.factors {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliObservable {
    type Err = QuantumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let factors = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(QuantumError::InvalidPauli(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if factors.is_empty() {
            return Err(QuantumError::InvalidPauli(s.to_string()));
        }
        Ok(Self::new(factors))
    }
}

impl Serialize for PauliObservable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
