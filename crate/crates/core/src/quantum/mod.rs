//! Dense few-qubit linear algebra: density matrices, pure states, Kraus
//! channels, Pauli observables and fidelity.
//!
//! Qubit 0 is the most significant bit of a basis index, so `|q0 q1⟩`
//! corresponds to index `2*q0 + q1` for two qubits.

mod channel;
mod ops;
mod pauli;
mod state;

pub use channel::{ChannelKind, FlipModel, NoiseChannel};
pub use ops::{
    cnot, embed_operator, hadamard, identity, pauli_x, pauli_y, pauli_z, rx, ry, s_dagger,
};
pub use pauli::{Pauli, PauliObservable};
pub use state::{expectation, fidelity, project_physical, DensityMatrix, PureState};

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Algebraic tolerance: Hermiticity, trace and norm checks.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Spectral tolerance: eigenvalue positivity and Kraus completeness.
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Largest register handled by full density-matrix pipelines.
pub const MAX_DENSITY_QUBITS: usize = 4;
/// Largest register handled as an explicit state vector.
pub const MAX_STATE_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace {0} differs from 1")]
    BadTrace(f64),
    #[error("negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("squared norm {0} differs from 1")]
    BadNorm(f64),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("parameter `{name}` = {value} is out of range")]
    Domain { name: &'static str, value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{requested} qubits exceeds the supported maximum of {max}")]
    TooManyQubits { requested: usize, max: usize },
    #[error("invalid qubit targets {0:?}")]
    InvalidTargets(Vec<usize>),
    #[error("invalid Pauli label `{0}`")]
    InvalidPauli(String),
}

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize, QuantumError> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(QuantumError::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<(), QuantumError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(QuantumError::Domain { name, value })
    }
}

/// Largest `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest absolute element difference between two matrices of equal shape.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Row-major real and imaginary parts of a complex matrix, for export.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MatrixParts {
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

impl From<&CMatrix> for MatrixParts {
    fn from(m: &CMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            real: rows(|c| c.re),
            imag: rows(|c| c.im),
        }
    }
}
