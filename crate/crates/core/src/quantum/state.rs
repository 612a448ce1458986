use nalgebra::{DVector, SymmetricEigen};

use super::channel::NoiseChannel;
use super::ops::embed_operator;
use super::pauli::PauliObservable;
use super::{
    hermitian_deviation, qubits_for_dim, CMatrix, CVector, QuantumError, ALGEBRAIC_TOL, C64,
    MAX_STATE_QUBITS, SPECTRAL_TOL,
};

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self, QuantumError> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        if n_qubits > MAX_STATE_QUBITS {
            return Err(QuantumError::TooManyQubits {
                requested: n_qubits,
                max: MAX_STATE_QUBITS,
            });
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(QuantumError::BadNorm(norm_sq));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(amplitudes: CVector) -> Result<Self, QuantumError> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(QuantumError::BadNorm(0.0));
        }
        Self::new(amplitudes / C64::new(norm, 0.0))
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, QuantumError> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(QuantumError::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`; `ghz(2)` is `|Φ+⟩`.
    pub fn ghz(n_qubits: usize) -> Result<Self, QuantumError> {
        if n_qubits == 0 {
            return Err(QuantumError::NotPowerOfTwo(1));
        }
        let dim = 1usize << n_qubits;
        let mut v = CVector::zeros(dim);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        v[0] = C64::new(h, 0.0);
        v[dim - 1] = C64::new(h, 0.0);
        Self::new(v)
    }

    pub fn phi_plus() -> Self {
        Self::ghz(2).expect("two-qubit GHZ state is valid")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<PureState, QuantumError> {
        let full = embed_operator(u, targets, self.n_qubits)?;
        Ok(PureState {
            n_qubits: self.n_qubits,
            amplitudes: full * &self.amplitudes,
        })
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// Trace-one positive semidefinite Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates every invariant (Hermitian, unit trace, PSD).
    pub fn new(matrix: CMatrix) -> Result<Self, QuantumError> {
        let n_qubits = check_square_pow2(&matrix)?;
        let dev = hermitian_deviation(&matrix);
        if dev > ALGEBRAIC_TOL {
            return Err(QuantumError::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > ALGEBRAIC_TOL || tr.im.abs() > ALGEBRAIC_TOL {
            return Err(QuantumError::BadTrace(tr.re));
        }
        let min_eig = min_eigenvalue(&matrix);
        if min_eig < -SPECTRAL_TOL {
            return Err(QuantumError::NotPositive(min_eig));
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            matrix: CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0),
        }
    }

    /// Diagonal state from a probability vector over basis indices.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self, QuantumError> {
        let v = DVector::from_iterator(
            probabilities.len(),
            probabilities.iter().map(|&p| C64::new(p, 0.0)),
        );
        Self::new(CMatrix::from_diagonal(&v))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Probabilities of the computational-basis outcomes.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<Self, QuantumError> {
        let full = embed_operator(u, targets, self.n_qubits)?;
        let matrix = &full * &self.matrix * full.adjoint();
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix,
        })
    }

    /// `Σ K ρ K†` with each Kraus operator lifted onto `targets`.
    pub fn apply_channel(
        &self,
        channel: &NoiseChannel,
        targets: &[usize],
    ) -> Result<Self, QuantumError> {
        if channel.dim() != 1 << targets.len() {
            return Err(QuantumError::InvalidChannel(format!(
                "{:?} channel of dimension {} applied to {} target(s)",
                channel.kind(),
                channel.dim(),
                targets.len()
            )));
        }
        let dim = self.dim();
        let mut out = CMatrix::zeros(dim, dim);
        for k in channel.kraus() {
            let full = embed_operator(k, targets, self.n_qubits)?;
            out += &full * &self.matrix * full.adjoint();
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: out,
        })
    }

    /// `(1 - w) ρ + w σ`.
    pub fn mix(&self, other: &DensityMatrix, weight: f64) -> Result<Self, QuantumError> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        super::check_probability("weight", weight)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * C64::new(1.0 - weight, 0.0)
                + &other.matrix * C64::new(weight, 0.0),
        })
    }
}

fn check_square_pow2(m: &CMatrix) -> Result<usize, QuantumError> {
    if m.nrows() != m.ncols() {
        return Err(QuantumError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    qubits_for_dim(m.nrows())
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn min_eigenvalue(m: &CMatrix) -> f64 {
    SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity(rho: &DensityMatrix, target: &PureState) -> Result<f64, QuantumError> {
    if rho.dim() != target.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: rho.dim(),
            found: target.dim(),
        });
    }
    let psi = target.amplitudes();
    let value = (psi.adjoint() * rho.matrix() * psi)[(0, 0)].re;
    Ok(value.clamp(0.0, 1.0))
}

/// `Tr(ρ P)`.
pub fn expectation(rho: &DensityMatrix, obs: &PauliObservable) -> Result<f64, QuantumError> {
    if obs.n_qubits() != rho.n_qubits() {
        return Err(QuantumError::DimensionMismatch {
            expected: rho.dim(),
            found: 1 << obs.n_qubits(),
        });
    }
    let p = obs.matrix();
    let mut acc = C64::new(0.0, 0.0);
    let m = rho.matrix();
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            acc += m[(i, j)] * p[(j, i)];
        }
    }
    Ok(acc.re)
}

/// Nearest density matrix in Frobenius norm: the eigenvalue vector is
/// projected onto the probability simplex, eigenvectors are kept.
pub fn project_physical(m: &CMatrix) -> Result<DensityMatrix, QuantumError> {
    let n_qubits = check_square_pow2(m)?;
    let dev = hermitian_deviation(m);
    if dev > SPECTRAL_TOL {
        return Err(QuantumError::NotHermitian(dev));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let projected = simplex_projection(eig.eigenvalues.as_slice());
    let vecs = &eig.eigenvectors;
    let diag = DVector::from_iterator(projected.len(), projected.iter().map(|&l| C64::new(l, 0.0)));
    let rebuilt = vecs * CMatrix::from_diagonal(&diag) * vecs.adjoint();
    let rebuilt = hermitian_part(&rebuilt);
    // Trace ≡ Σ projected = 1 up to rounding; pin it so validation cannot fail.
    let tr = rebuilt.trace().re;
    let matrix = rebuilt / C64::new(tr, 0.0);
    Ok(DensityMatrix { n_qubits, matrix })
}

/// Euclidean projection of `v` onto `{x : x ≥ 0, Σx = 1}`.
fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k as f64 + 1.0);
        if u - candidate > 0.0 {
            shift = candidate;
        }
    }
    v.iter().map(|&x| (x - shift).max(0.0)).collect()
}
