use serde::{Deserialize, Serialize};

use super::ops::{identity, pauli_x, pauli_z};
use super::{check_probability, qubits_for_dim, CMatrix, QuantumError, C64, SPECTRAL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    BitFlip,
    PhaseFlip,
    /// One Pauli channel carrying both flips, `p/2` each.
    SplitFlip,
    AmplitudeDamping,
    /// Classical asymmetric readout confusion acting on populations.
    Confusion,
    Custom,
}

/// How the "bit and phase flip" error of a single pulse is realized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipModel {
    /// A bit-flip channel with probability `p`, then a phase-flip channel
    /// with probability `p`.
    #[default]
    Sequential,
    /// One channel: `X` with `p/2`, `Z` with `p/2`.
    Split,
}

impl FlipModel {
    /// Channels for one pulse error of magnitude `p`.
    pub fn channels(self, p: f64) -> Result<Vec<NoiseChannel>, QuantumError> {
        match self {
            FlipModel::Sequential => Ok(vec![
                NoiseChannel::bit_flip(p)?,
                NoiseChannel::phase_flip(p)?,
            ]),
            FlipModel::Split => Ok(vec![NoiseChannel::split_flip(p)?]),
        }
    }
}

/// A trace-preserving channel given by its Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    kind: ChannelKind,
    parameter: f64,
    kraus: Vec<CMatrix>,
}

fn scaled(m: CMatrix, factor: f64) -> CMatrix {
    m * C64::new(factor, 0.0)
}

impl NoiseChannel {
    /// Builds a channel from arbitrary Kraus operators, checking completeness.
    pub fn from_kraus(
        kind: ChannelKind,
        parameter: f64,
        kraus: Vec<CMatrix>,
    ) -> Result<Self, QuantumError> {
        let first = kraus
            .first()
            .ok_or_else(|| QuantumError::InvalidChannel("no Kraus operators".into()))?;
        let dim = first.nrows();
        qubits_for_dim(dim)?;
        if kraus.iter().any(|k| k.nrows() != dim || k.ncols() != dim) {
            return Err(QuantumError::InvalidChannel(
                "Kraus operators differ in shape".into(),
            ));
        }
        let channel = Self {
            kind,
            parameter,
            kraus,
        };
        let dev = channel.completeness_deviation();
        if dev > SPECTRAL_TOL {
            return Err(QuantumError::InvalidChannel(format!(
                "Kraus completeness violated by {dev:e}"
            )));
        }
        Ok(channel)
    }

    /// `{√(1-p) I, √p X}`.
    pub fn bit_flip(p: f64) -> Result<Self, QuantumError> {
        check_probability("p", p)?;
        Self::from_kraus(
            ChannelKind::BitFlip,
            p,
            vec![
                scaled(identity(2), (1.0 - p).sqrt()),
                scaled(pauli_x(), p.sqrt()),
            ],
        )
    }

    /// `{√(1-p) I, √p Z}`.
    pub fn phase_flip(p: f64) -> Result<Self, QuantumError> {
        check_probability("p", p)?;
        Self::from_kraus(
            ChannelKind::PhaseFlip,
            p,
            vec![
                scaled(identity(2), (1.0 - p).sqrt()),
                scaled(pauli_z(), p.sqrt()),
            ],
        )
    }

    /// `{√(1-p) I, √(p/2) X, √(p/2) Z}`.
    pub fn split_flip(p: f64) -> Result<Self, QuantumError> {
        check_probability("p", p)?;
        Self::from_kraus(
            ChannelKind::SplitFlip,
            p,
            vec![
                scaled(identity(2), (1.0 - p).sqrt()),
                scaled(pauli_x(), (p / 2.0).sqrt()),
                scaled(pauli_z(), (p / 2.0).sqrt()),
            ],
        )
    }

    /// Decay `|1⟩ → |0⟩` with probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self, QuantumError> {
        check_probability("gamma", gamma)?;
        let mut k0 = CMatrix::zeros(2, 2);
        k0[(0, 0)] = C64::new(1.0, 0.0);
        k0[(1, 1)] = C64::new((1.0 - gamma).sqrt(), 0.0);
        let mut k1 = CMatrix::zeros(2, 2);
        k1[(0, 1)] = C64::new(gamma.sqrt(), 0.0);
        Self::from_kraus(ChannelKind::AmplitudeDamping, gamma, vec![k0, k1])
    }

    /// Reports `1` for a true `0` with probability `p_read1_given0` and `0`
    /// for a true `1` with probability `p_read0_given1`. Destroys coherences.
    pub fn confusion(p_read1_given0: f64, p_read0_given1: f64) -> Result<Self, QuantumError> {
        check_probability("p_read1_given0", p_read1_given0)?;
        check_probability("p_read0_given1", p_read0_given1)?;
        let entry = |row: usize, col: usize, p: f64| {
            let mut m = CMatrix::zeros(2, 2);
            m[(row, col)] = C64::new(p.sqrt(), 0.0);
            m
        };
        Self::from_kraus(
            ChannelKind::Confusion,
            p_read1_given0.max(p_read0_given1),
            vec![
                entry(0, 0, 1.0 - p_read1_given0),
                entry(1, 0, p_read1_given0),
                entry(1, 1, 1.0 - p_read0_given1),
                entry(0, 1, p_read0_given1),
            ],
        )
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn parameter(&self) -> f64 {
        self.parameter
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    /// Largest element of `|Σ K†K − I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut sum = CMatrix::zeros(dim, dim);
        for k in &self.kraus {
            sum += k.adjoint() * k;
        }
        super::max_abs_diff(&sum, &identity(dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{max_abs_diff, DensityMatrix, PureState};

    #[test]
    fn bit_flip_kraus_form() {
        let p = 4e-4;
        let ch = NoiseChannel::bit_flip(p).unwrap();
        assert_eq!(ch.kraus().len(), 2);
        assert!(max_abs_diff(&ch.kraus()[0], &scaled(identity(2), (1.0 - p).sqrt())) < 1e-15);
        assert!(max_abs_diff(&ch.kraus()[1], &scaled(pauli_x(), p.sqrt())) < 1e-15);
    }

    #[test]
    fn zero_damping_is_identity_plus_null() {
        let ch = NoiseChannel::amplitude_damping(0.0).unwrap();
        assert!(max_abs_diff(&ch.kraus()[0], &identity(2)) < 1e-15);
        assert!(max_abs_diff(&ch.kraus()[1], &CMatrix::zeros(2, 2)) < 1e-15);
    }

    #[test]
    fn full_phase_flip_is_deterministic_z() {
        let ch = NoiseChannel::phase_flip(1.0).unwrap();
        assert!(max_abs_diff(&ch.kraus()[0], &CMatrix::zeros(2, 2)) < 1e-15);
        assert!(max_abs_diff(&ch.kraus()[1], &pauli_z()) < 1e-15);
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(matches!(
            NoiseChannel::bit_flip(-0.1),
            Err(QuantumError::Domain { .. })
        ));
        assert!(NoiseChannel::phase_flip(1.5).is_err());
        assert!(NoiseChannel::amplitude_damping(f64::NAN).is_err());
        assert!(NoiseChannel::confusion(0.1, 2.0).is_err());
    }

    #[test]
    fn channel_application_examples() {
        let rho = PureState::phi_plus().to_density();
        let same = rho
            .apply_channel(&NoiseChannel::bit_flip(0.0).unwrap(), &[1])
            .unwrap();
        assert!(max_abs_diff(same.matrix(), rho.matrix()) < 1e-15);

        let zero = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let half = zero
            .apply_channel(&NoiseChannel::bit_flip(0.5).unwrap(), &[0])
            .unwrap();
        assert!(max_abs_diff(half.matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);

        let gamma = 1.0 - (-1.6e-6_f64 / 1.9e-3).exp();
        assert!((gamma - 8.418e-4).abs() < 1e-6);
        let one = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        let ch = NoiseChannel::amplitude_damping(8e-4).unwrap();
        let decayed = one.apply_channel(&ch, &[0]).unwrap();
        assert!((decayed.populations()[0] - 8e-4).abs() < 1e-15);
        assert!((decayed.populations()[1] - (1.0 - 8e-4)).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(2);
        let ch = NoiseChannel::bit_flip(0.1).unwrap();
        assert!(matches!(
            rho.apply_channel(&ch, &[0, 1]),
            Err(QuantumError::InvalidChannel(_))
        ));
        assert!(rho.apply_channel(&ch, &[3]).is_err());
        assert!(
            NoiseChannel::from_kraus(ChannelKind::Custom, 0.0, vec![scaled(identity(2), 0.5)])
                .is_err()
        );
    }

    #[test]
    fn confusion_acts_on_populations() {
        let rho = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let out = rho
            .apply_channel(&NoiseChannel::confusion(2e-3, 0.0).unwrap(), &[0])
            .unwrap();
        assert!((out.populations()[1] - 2e-3).abs() < 1e-15);
    }

    #[test]
    fn split_model_has_single_channel() {
        let chans = FlipModel::Split.channels(8e-4).unwrap();
        assert_eq!(chans.len(), 1);
        assert_eq!(FlipModel::Sequential.channels(8e-4).unwrap().len(), 2);
    }
}
