use std::fmt;

use serde::{Deserialize, Serialize};

use super::ReadoutError;

/// Europium excited-state lifetime (s).
pub const EU_T1: f64 = 1.9e-3;

/// Background count rate (counts/s) frozen by `calibrate_background` so that
/// direct readout at 1 % efficiency and `t_det = 0.15·T1` distinguishes the
/// two states with probability 0.93.
pub const CALIBRATED_BACKGROUND_RATE: f64 = 3641.0;

/// Qubit label. `Zero` is the dark state: in the buffered sequence it lets
/// the buffer ion be excited, which shifts the readout ion off resonance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum QubitState {
    Zero,
    One,
}

impl QubitState {
    pub fn index(self) -> usize {
        match self {
            QubitState::Zero => 0,
            QubitState::One => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            QubitState::Zero => QubitState::One,
            QubitState::One => QubitState::Zero,
        }
    }
}

impl From<QubitState> for u8 {
    fn from(s: QubitState) -> u8 {
        s.index() as u8
    }
}

impl TryFrom<u8> for QubitState {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            0 => Ok(QubitState::Zero),
            1 => Ok(QubitState::One),
            other => Err(format!("qubit label must be 0 or 1, got {other}")),
        }
    }
}

impl fmt::Display for QubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Physical constants of the readout chain. Times in seconds, rates in
/// counts per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutParams {
    /// Lifetime of the qubit (and buffer) excited state.
    pub t1_qubit: f64,
    /// Radiative lifetime of the bare readout ion.
    pub tau_readout_native: f64,
    pub purcell_factor: f64,
    /// Effective cycling lifetime of the cavity-coupled readout ion.
    pub tau_eff: f64,
    /// Emission rate under saturated driving is `emission_rate_factor / tau_eff`.
    pub emission_rate_factor: f64,
    /// Total detection efficiency.
    pub eta: f64,
    pub background_rate: f64,
    /// Detection window per readout.
    pub t_det: f64,
    /// Buffer repetitions per buffered readout.
    pub n_reps: u32,
    /// Failure probability of one transfer pulse.
    pub p_transfer_err: f64,
    pub t_pulse: f64,
    /// Time the qubit spends in `|e⟩` during one buffer cycle.
    pub t_excited_per_rep: f64,
    /// Probability that a decay from `|e⟩` lands in the dark ground level.
    pub decay_branching_to_dark: f64,
    /// Buffer re-initialization time between repetitions (time cost only).
    pub reset_time: f64,
}

impl Default for ReadoutParams {
    fn default() -> Self {
        let t_pulse = 400e-9;
        Self {
            t1_qubit: EU_T1,
            tau_readout_native: 100e-6,
            purcell_factor: 1e4,
            tau_eff: 200e-9,
            emission_rate_factor: 0.5,
            eta: 0.01,
            background_rate: CALIBRATED_BACKGROUND_RATE,
            t_det: 0.15 * EU_T1,
            n_reps: 10,
            p_transfer_err: 4e-4,
            t_pulse,
            t_excited_per_rep: 2.0 * t_pulse,
            decay_branching_to_dark: 0.5,
            reset_time: 10e-6,
        }
    }
}

impl ReadoutParams {
    /// The 10 %-efficiency setup: three repetitions, `t_det = 0.025·T1`.
    pub fn high_efficiency() -> Self {
        Self {
            eta: 0.10,
            n_reps: 3,
            t_det: 0.025 * EU_T1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ReadoutError> {
        let positive = [
            ("t1_qubit", self.t1_qubit),
            ("tau_readout_native", self.tau_readout_native),
            ("tau_eff", self.tau_eff),
            ("t_det", self.t_det),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(ReadoutError::invalid(name, "must be positive"));
            }
        }
        let nonneg = [
            ("background_rate", self.background_rate),
            ("t_pulse", self.t_pulse),
            ("t_excited_per_rep", self.t_excited_per_rep),
            ("reset_time", self.reset_time),
            ("emission_rate_factor", self.emission_rate_factor),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || v.is_infinite() {
                return Err(ReadoutError::invalid(
                    name,
                    "must be finite and non-negative",
                ));
            }
        }
        let probs = [
            ("eta", self.eta),
            ("p_transfer_err", self.p_transfer_err),
            ("decay_branching_to_dark", self.decay_branching_to_dark),
        ];
        for (name, v) in probs {
            if !(0.0..=1.0).contains(&v) {
                return Err(ReadoutError::invalid(name, "must lie in [0, 1]"));
            }
        }
        if !(self.purcell_factor >= 1.0) {
            return Err(ReadoutError::invalid(
                "purcell_factor",
                "must be at least 1",
            ));
        }
        if self.tau_eff > self.tau_readout_native {
            return Err(ReadoutError::invalid(
                "tau_eff",
                "must not exceed tau_readout_native",
            ));
        }
        if self.n_reps == 0 {
            return Err(ReadoutError::invalid("n_reps", "must be at least 1"));
        }
        Ok(())
    }

    /// Photons per second emitted by the unshifted readout ion.
    pub fn emission_rate(&self) -> f64 {
        self.emission_rate_factor / self.tau_eff
    }

    /// Detected signal counts per second from a fluorescing readout ion.
    pub fn signal_rate(&self) -> f64 {
        self.eta * self.emission_rate()
    }

    /// Mean counts in one bright window.
    pub fn bright_window_mean(&self) -> f64 {
        (self.signal_rate() + self.background_rate) * self.t_det
    }

    /// Probability that an excited qubit decays during one buffer cycle.
    pub fn decay_per_rep(&self) -> f64 {
        -(-self.t_excited_per_rep / self.t1_qubit).exp_m1()
    }

    /// Wall-clock duration of a buffered readout.
    pub fn buffered_duration(&self) -> f64 {
        f64::from(self.n_reps) * (3.0 * self.t_pulse + self.t_det + self.reset_time)
    }
}
