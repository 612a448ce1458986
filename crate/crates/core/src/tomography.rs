//! Two-qubit state tomography through an imperfect readout.
//!
//! Each of the nine local-basis settings rotates the measured basis onto Z,
//! charges a single-qubit gate error per rotated qubit, and reads both qubits
//! through a per-qubit confusion matrix. The 15 Pauli expectations are
//! inverted linearly and projected back onto the physical states.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::quantum::{
    fidelity, hadamard, project_physical, s_dagger, CMatrix, DensityMatrix, FlipModel, MatrixParts,
    Pauli, PauliObservable, PureState, QuantumError, C64,
};
use crate::readout::{ConfusionMatrix, QubitState, ReadoutError};
use crate::rng::instance_rng;

#[derive(Debug, thiserror::Error)]
pub enum TomographyError {
    #[error("incomplete data: setting {0} is missing")]
    IncompleteData(MeasurementSetting),
    #[error("setting {0} appears more than once")]
    DuplicateSetting(MeasurementSetting),
    #[error("tomography needs a two-qubit state, got {0} qubits")]
    NotTwoQubits(usize),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Readout(#[from] ReadoutError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }

    /// Unitary taking the +1 eigenstate of this basis to `|0⟩`.
    fn to_z(self) -> Option<CMatrix> {
        match self {
            Basis::X => Some(hadamard()),
            Basis::Y => Some(hadamard() * s_dagger()),
            Basis::Z => None,
        }
    }
}

/// Local measurement basis for qubit 0 and qubit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub bases: [Basis; 2],
}

impl MeasurementSetting {
    pub fn new(first: Basis, second: Basis) -> Self {
        Self {
            bases: [first, second],
        }
    }

    /// The nine settings in `XX, XY, …, ZZ` order.
    pub fn all() -> Vec<MeasurementSetting> {
        Basis::ALL
            .iter()
            .flat_map(|&a| Basis::ALL.iter().map(move |&b| Self::new(a, b)))
            .collect()
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.bases[0], self.bases[1])
    }
}

/// Outcome distribution over `[00, 01, 10, 11]` (qubit 0 first).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingOutcome {
    pub setting: MeasurementSetting,
    pub probabilities: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TomographyParams {
    /// Bit- and phase-flip probability of each basis-change rotation.
    pub rotation_error: f64,
    pub confusion: ConfusionMatrix,
    /// Finite-shot sampling per setting; `None` uses exact probabilities.
    pub shots: Option<u64>,
}

impl Default for TomographyParams {
    fn default() -> Self {
        Self {
            rotation_error: 8e-4,
            confusion: ConfusionMatrix {
                p_read1_given0: 2e-3,
                p_read0_given1: 0.0,
            },
            shots: None,
        }
    }
}

impl TomographyParams {
    pub fn ideal() -> Self {
        Self {
            rotation_error: 0.0,
            confusion: ConfusionMatrix::perfect(),
            shots: None,
        }
    }
}

fn bit(index: usize, qubit: usize) -> usize {
    (index >> (1 - qubit)) & 1
}

fn state_of(b: usize) -> QubitState {
    if b == 0 {
        QubitState::Zero
    } else {
        QubitState::One
    }
}

/// Exact outcome distribution of one setting.
pub fn measure_setting(
    rho: &DensityMatrix,
    setting: MeasurementSetting,
    rotation_error: f64,
    confusion: &ConfusionMatrix,
) -> Result<SettingOutcome, TomographyError> {
    if rho.n_qubits() != 2 {
        return Err(TomographyError::NotTwoQubits(rho.n_qubits()));
    }
    confusion.validate()?;
    let mut state = rho.clone();
    for (qubit, basis) in setting.bases.iter().enumerate() {
        if let Some(u) = basis.to_z() {
            state = state.apply_unitary(&u, &[qubit])?;
            for ch in FlipModel::Sequential.channels(rotation_error)? {
                state = state.apply_channel(&ch, &[qubit])?;
            }
        }
    }
    let exact = state.populations();
    let mut probabilities = [0.0; 4];
    for (reported, out) in probabilities.iter_mut().enumerate() {
        *out = (0..4)
            .map(|actual| {
                exact[actual]
                    * confusion.probability(state_of(bit(actual, 0)), state_of(bit(reported, 0)))
                    * confusion.probability(state_of(bit(actual, 1)), state_of(bit(reported, 1)))
            })
            .sum();
    }
    Ok(SettingOutcome {
        setting,
        probabilities,
    })
}

/// All nine settings in fixed order.
pub fn measure_all(
    rho: &DensityMatrix,
    rotation_error: f64,
    confusion: &ConfusionMatrix,
) -> Result<Vec<SettingOutcome>, TomographyError> {
    MeasurementSetting::all()
        .into_iter()
        .map(|s| measure_setting(rho, s, rotation_error, confusion))
        .collect()
}

/// Replaces an exact distribution by empirical frequencies from `shots`
/// draws, using conditional binomials over the four outcomes.
pub fn sample_outcome<R: Rng + ?Sized>(
    outcome: &SettingOutcome,
    shots: u64,
    rng: &mut R,
) -> SettingOutcome {
    let mut remaining = shots;
    let mut mass_left = 1.0;
    let mut probabilities = [0.0; 4];
    for (k, &p) in outcome.probabilities.iter().enumerate() {
        let n = if k == 3 || remaining == 0 {
            remaining
        } else {
            let q = (p.max(0.0) / mass_left).clamp(0.0, 1.0);
            Binomial::new(remaining, q)
                .expect("q lies in [0, 1]")
                .sample(rng)
        };
        probabilities[k] = n as f64 / shots as f64;
        remaining -= n;
        mass_left -= p.max(0.0);
    }
    SettingOutcome {
        setting: outcome.setting,
        probabilities,
    }
}

fn parity(index: usize, factors: [Pauli; 2]) -> f64 {
    let flips = (0..2)
        .filter(|&q| factors[q] != Pauli::I && bit(index, q) == 1)
        .count();
    if flips % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn index_outcomes(
    outcomes: &[SettingOutcome],
) -> Result<BTreeMap<MeasurementSetting, [f64; 4]>, TomographyError> {
    let mut by_setting = BTreeMap::new();
    for o in outcomes {
        if by_setting.insert(o.setting, o.probabilities).is_some() {
            return Err(TomographyError::DuplicateSetting(o.setting));
        }
    }
    for s in MeasurementSetting::all() {
        if !by_setting.contains_key(&s) {
            return Err(TomographyError::IncompleteData(s));
        }
    }
    Ok(by_setting)
}

/// The 15 non-identity expectations. A single-qubit Pauli is read from the
/// marginal of every setting that measures it; those three estimates are
/// averaged with equal weight.
pub fn estimate_expectations(
    outcomes: &[SettingOutcome],
) -> Result<BTreeMap<PauliObservable, f64>, TomographyError> {
    let by_setting = index_outcomes(outcomes)?;
    let mut out = BTreeMap::new();
    for obs in PauliObservable::all(2).into_iter().skip(1) {
        let factors = [obs.factors()[0], obs.factors()[1]];
        let mut total = 0.0;
        let mut count = 0usize;
        for (setting, probs) in &by_setting {
            let compatible =
                (0..2).all(|q| factors[q] == Pauli::I || factors[q] == setting.bases[q].pauli());
            if compatible {
                total += probs
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p * parity(i, factors))
                    .sum::<f64>();
                count += 1;
            }
        }
        out.insert(obs, total / count as f64);
    }
    Ok(out)
}

/// `(I + Σ ⟨P⟩ P) / 4` before any projection.
pub fn linear_inversion(expectations: &BTreeMap<PauliObservable, f64>) -> CMatrix {
    let mut m = PauliObservable::identity(2).matrix();
    for (obs, &value) in expectations {
        m += obs.matrix() * C64::new(value, 0.0);
    }
    m / C64::new(4.0, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    pub expectations: BTreeMap<PauliObservable, f64>,
    pub rho_reconstructed: DensityMatrix,
    pub fidelity_with_readout: f64,
}

impl Serialize for TomographyResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Export<'a> {
            expectations: &'a BTreeMap<PauliObservable, f64>,
            rho_reconstructed: MatrixParts,
            fidelity_with_readout: f64,
        }
        Export {
            expectations: &self.expectations,
            rho_reconstructed: MatrixParts::from(self.rho_reconstructed.matrix()),
            fidelity_with_readout: self.fidelity_with_readout,
        }
        .serialize(serializer)
    }
}

pub fn reconstruct(
    outcomes: &[SettingOutcome],
    target: &PureState,
) -> Result<TomographyResult, TomographyError> {
    let expectations = estimate_expectations(outcomes)?;
    let rho_reconstructed = project_physical(&linear_inversion(&expectations))?;
    let fidelity_with_readout = fidelity(&rho_reconstructed, target)?;
    Ok(TomographyResult {
        expectations,
        rho_reconstructed,
        fidelity_with_readout,
    })
}

/// Measures all settings of `rho` under `params` and reconstructs. `seed`
/// only matters when `params.shots` is set.
pub fn run_tomography(
    rho: &DensityMatrix,
    target: &PureState,
    params: &TomographyParams,
    seed: u64,
) -> Result<TomographyResult, TomographyError> {
    let mut outcomes = measure_all(rho, params.rotation_error, &params.confusion)?;
    if let Some(shots) = params.shots.filter(|&s| s > 0) {
        for (k, o) in outcomes.iter_mut().enumerate() {
            let mut rng = instance_rng(seed, k as u64);
            *o = sample_outcome(o, shots, &mut rng);
        }
    }
    reconstruct(&outcomes, target)
}
