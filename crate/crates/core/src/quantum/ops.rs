use super::{CMatrix, QuantumError, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)])
}

pub fn s_dagger() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., -1.)])
}

/// `exp(-i θ X / 2)`.
pub fn rx(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    CMatrix::from_row_slice(2, 2, &[c(co, 0.), c(0., -s), c(0., -s), c(co, 0.)])
}

/// `exp(-i θ Y / 2)`.
pub fn ry(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    CMatrix::from_row_slice(2, 2, &[c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.)])
}

/// Two-qubit CNOT with the first qubit as control.
pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = c(1., 0.);
    m[(1, 1)] = c(1., 0.);
    m[(2, 3)] = c(1., 0.);
    m[(3, 2)] = c(1., 0.);
    m
}

/// Lifts `op`, acting on `targets` (first target is the most significant
/// bit of `op`'s index), to the full `n_qubits` register.
pub fn embed_operator(
    op: &CMatrix,
    targets: &[usize],
    n_qubits: usize,
) -> Result<CMatrix, QuantumError> {
    let k = targets.len();
    if k == 0 || op.nrows() != 1 << k || op.ncols() != 1 << k {
        return Err(QuantumError::InvalidChannel(format!(
            "operator of shape {}x{} cannot act on {} target qubit(s)",
            op.nrows(),
            op.ncols(),
            k
        )));
    }
    let mut seen = 0usize;
    for &t in targets {
        if t >= n_qubits || seen & (1 << t) != 0 {
            return Err(QuantumError::InvalidTargets(targets.to_vec()));
        }
        seen |= 1 << t;
    }
    let dim = 1usize << n_qubits;
    let shifts: Vec<usize> = targets.iter().map(|&t| n_qubits - 1 - t).collect();
    let target_mask: usize = shifts.iter().map(|s| 1usize << s).sum();
    let sub_index = |i: usize| {
        shifts
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | ((i >> s) & 1))
    };
    let mut full = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let si = sub_index(i);
        for j in 0..dim {
            if i & !target_mask == j & !target_mask {
                full[(i, j)] = op[(si, sub_index(j))];
            }
        }
    }
    Ok(full)
}
