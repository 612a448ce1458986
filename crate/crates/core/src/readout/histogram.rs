use serde::{Deserialize, Serialize};

use super::{QubitState, ReadoutError};

/// Probability mass over detected photon counts, indexed by count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonHistogram {
    prepared_state: QubitState,
    n_trials: u64,
    probabilities: Vec<f64>,
}

impl PhotonHistogram {
    pub fn from_counts(counts: &[u64], prepared_state: QubitState) -> Result<Self, ReadoutError> {
        let n_trials: u64 = counts.iter().sum();
        if n_trials == 0 {
            return Err(ReadoutError::EmptyHistogram);
        }
        let last = counts.iter().rposition(|&c| c > 0).unwrap_or(0);
        let probabilities = counts[..=last]
            .iter()
            .map(|&c| c as f64 / n_trials as f64)
            .collect();
        Ok(Self {
            prepared_state,
            n_trials,
            probabilities,
        })
    }

    /// Exact distribution (e.g. from a closed form); `n_trials` is 0.
    pub fn from_masses(masses: Vec<f64>, prepared_state: QubitState) -> Result<Self, ReadoutError> {
        if masses.is_empty() {
            return Err(ReadoutError::EmptyHistogram);
        }
        if masses.iter().any(|&m| !(m >= 0.0)) {
            return Err(ReadoutError::invalid("masses", "must be non-negative"));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(ReadoutError::invalid("masses", "must sum to 1"));
        }
        Ok(Self {
            prepared_state,
            n_trials: 0,
            probabilities: masses,
        })
    }

    pub fn prepared_state(&self) -> QubitState {
        self.prepared_state
    }

    pub fn n_trials(&self) -> u64 {
        self.n_trials
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn mass(&self, n: usize) -> f64 {
        self.probabilities.get(n).copied().unwrap_or(0.0)
    }

    pub fn max_count(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// `P(n < threshold)`.
    pub fn mass_below(&self, threshold: usize) -> f64 {
        self.probabilities.iter().take(threshold).sum()
    }

    /// CSV rows `n_photons,probability,prepared_state` (no header).
    pub fn csv_rows(&self) -> impl Iterator<Item = String> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .map(move |(n, p)| format!("{n},{p},{}", self.prepared_state))
    }
}

/// Header line for [`PhotonHistogram::csv_rows`].
pub const HISTOGRAM_CSV_HEADER: &str = "n_photons,probability,prepared_state";

/// Counts at or above `threshold` are assigned to `decide_bright_as`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadoutPolicy {
    pub threshold: usize,
    pub decide_bright_as: QubitState,
}

impl ReadoutPolicy {
    pub fn classify(&self, photons: usize) -> QubitState {
        if photons >= self.threshold {
            self.decide_bright_as
        } else {
            self.decide_bright_as.flipped()
        }
    }

    /// Probability that a state prepared as `h.prepared_state()` is reported
    /// correctly.
    pub fn correct_probability(&self, h: &PhotonHistogram) -> f64 {
        let below = h.mass_below(self.threshold);
        if h.prepared_state() == self.decide_bright_as {
            1.0 - below
        } else {
            below
        }
    }
}

/// Per-state readout error, possibly asymmetric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfusionMatrix {
    pub p_read1_given0: f64,
    pub p_read0_given1: f64,
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        Self::perfect()
    }
}

impl ConfusionMatrix {
    pub fn new(p_read1_given0: f64, p_read0_given1: f64) -> Result<Self, ReadoutError> {
        let m = Self {
            p_read1_given0,
            p_read0_given1,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn perfect() -> Self {
        Self {
            p_read1_given0: 0.0,
            p_read0_given1: 0.0,
        }
    }

    pub fn symmetric(p: f64) -> Result<Self, ReadoutError> {
        Self::new(p, p)
    }

    pub fn validate(&self) -> Result<(), ReadoutError> {
        if !(0.0..=1.0).contains(&self.p_read1_given0) {
            return Err(ReadoutError::invalid(
                "p_read1_given0",
                "must lie in [0, 1]",
            ));
        }
        if !(0.0..=1.0).contains(&self.p_read0_given1) {
            return Err(ReadoutError::invalid(
                "p_read0_given1",
                "must lie in [0, 1]",
            ));
        }
        Ok(())
    }

    /// Equal-prior error probability.
    pub fn average_error(&self) -> f64 {
        0.5 * (self.p_read1_given0 + self.p_read0_given1)
    }

    /// `P(report = reported | true = actual)`.
    pub fn probability(&self, actual: QubitState, reported: QubitState) -> f64 {
        match (actual, reported) {
            (QubitState::Zero, QubitState::One) => self.p_read1_given0,
            (QubitState::Zero, QubitState::Zero) => 1.0 - self.p_read1_given0,
            (QubitState::One, QubitState::Zero) => self.p_read0_given1,
            (QubitState::One, QubitState::One) => 1.0 - self.p_read0_given1,
        }
    }

    pub fn from_policy(policy: &ReadoutPolicy, h0: &PhotonHistogram, h1: &PhotonHistogram) -> Self {
        Self {
            p_read1_given0: 1.0 - policy.correct_probability(h0),
            p_read0_given1: 1.0 - policy.correct_probability(h1),
        }
    }
}

/// Equal-prior optimal threshold over `0..=max_count+1`, both
/// orientations; ties go to the smaller threshold, then to `One` as the
/// bright state.
pub fn optimal_threshold(
    h0: &PhotonHistogram,
    h1: &PhotonHistogram,
) -> Result<(ReadoutPolicy, f64), ReadoutError> {
    if h0.prepared_state() == h1.prepared_state() {
        return Err(ReadoutError::MismatchedHistograms);
    }
    let (h0, h1) = if h0.prepared_state() == QubitState::Zero {
        (h0, h1)
    } else {
        (h1, h0)
    };
    let top = h0.max_count().max(h1.max_count()) + 1;
    let mut best: Option<(ReadoutPolicy, f64)> = None;
    for threshold in 0..=top {
        for bright in [QubitState::One, QubitState::Zero] {
            let policy = ReadoutPolicy {
                threshold,
                decide_bright_as: bright,
            };
            let d = 0.5 * (policy.correct_probability(h0) + policy.correct_probability(h1));
            if best.is_none_or(|(_, b)| d > b) {
                best = Some((policy, d));
            }
        }
    }
    Ok(best.expect("threshold range is never empty"))
}
