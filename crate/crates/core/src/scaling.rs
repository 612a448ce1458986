//! First-order GHZ fidelity prediction for `n` qubits built from `n − 1`
//! CNOTs, with and without per-qubit readout.

use serde::{Deserialize, Serialize};

use crate::gate::ErrorBudget;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScalingError {
    #[error("n_max must be at least 2, got {0}")]
    TooFewQubits(usize),
    #[error("`{name}` = {value} must lie in [0, 1]")]
    Domain { name: &'static str, value: f64 },
    #[error("schedule is not a valid GHZ preparation on {0} qubits")]
    InvalidSchedule(usize),
    #[error("chain and star schedules disagree at n = {0}")]
    ScheduleMismatch(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Accumulation {
    /// `F = 1 − Σ ε`.
    #[default]
    Additive,
    /// `F = Π (1 − ε)`.
    Product,
}

/// Order of the `n − 1` CNOTs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// `k → k + 1`, nearest neighbors only.
    Chain,
    /// `0 → k`, one control for every target.
    Star,
}

impl Schedule {
    /// `(control, target)` pairs in application order.
    pub fn gates(self, n: usize) -> Vec<(usize, usize)> {
        (1..n)
            .map(|k| match self {
                Schedule::Chain => (k - 1, k),
                Schedule::Star => (0, k),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingParams {
    pub n_max: usize,
    /// Readout error charged per qubit.
    pub readout_error: f64,
    /// Error of the basis-change pulse charged per qubit during tomography.
    pub tomography_pulse_error: f64,
    pub accumulation: Accumulation,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self {
            n_max: 10,
            readout_error: 1e-3,
            tomography_pulse_error: 8e-4,
            accumulation: Accumulation::Additive,
        }
    }
}

impl ScalingParams {
    pub fn validate(&self) -> Result<(), ScalingError> {
        if self.n_max < 2 {
            return Err(ScalingError::TooFewQubits(self.n_max));
        }
        for (name, value) in [
            ("readout_error", self.readout_error),
            ("tomography_pulse_error", self.tomography_pulse_error),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ScalingError::Domain { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzRow {
    pub n: usize,
    pub f_no_readout: f64,
    pub f_with_readout: f64,
}

pub const GHZ_CSV_HEADER: &str = "n,f_no_readout,f_with_readout";

impl GhzRow {
    pub fn csv_row(&self) -> String {
        format!("{},{},{}", self.n, self.f_no_readout, self.f_with_readout)
    }
}

fn check_budget(b: &ErrorBudget) -> Result<(), ScalingError> {
    for (name, value) in [
        ("init_per_qubit", b.init_per_qubit),
        ("superposition", b.superposition),
        ("cnot_core", b.cnot_core),
    ] {
        if !(0.0..=1.0).contains(&value) {
            return Err(ScalingError::Domain { name, value });
        }
    }
    Ok(())
}

/// Every error event of preparing an `n`-qubit GHZ state with `schedule`,
/// after checking that each CNOT's control already carries the
/// superposition and each target is fresh.
pub fn preparation_errors(
    budget: &ErrorBudget,
    schedule: Schedule,
    n: usize,
) -> Result<Vec<f64>, ScalingError> {
    let mut entangled = vec![false; n];
    if n == 0 {
        return Err(ScalingError::InvalidSchedule(n));
    }
    entangled[0] = true;
    let mut events = vec![budget.init_per_qubit; n];
    events.push(budget.superposition);
    for (control, target) in schedule.gates(n) {
        if control >= n || target >= n || !entangled[control] || entangled[target] {
            return Err(ScalingError::InvalidSchedule(n));
        }
        entangled[target] = true;
        events.push(budget.cnot_core);
    }
    if entangled.iter().any(|&e| !e) {
        return Err(ScalingError::InvalidSchedule(n));
    }
    Ok(events)
}

fn combine(events: &[f64], mode: Accumulation) -> f64 {
    let f = match mode {
        Accumulation::Additive => 1.0 - events.iter().sum::<f64>(),
        Accumulation::Product => events.iter().map(|e| 1.0 - e).product(),
    };
    f.clamp(0.0, 1.0)
}

/// One row of the curve for a specific schedule.
pub fn ghz_fidelity(
    budget: &ErrorBudget,
    params: &ScalingParams,
    schedule: Schedule,
    n: usize,
) -> Result<GhzRow, ScalingError> {
    let coherent = preparation_errors(budget, schedule, n)?;
    let mut with_readout = coherent.clone();
    with_readout.extend(std::iter::repeat_n(params.readout_error, n));
    with_readout.extend(std::iter::repeat_n(params.tomography_pulse_error, n));
    Ok(GhzRow {
        n,
        f_no_readout: combine(&coherent, params.accumulation),
        f_with_readout: combine(&with_readout, params.accumulation),
    })
}

/// Rows for `n = 2..=n_max`. Both schedules are evaluated and must agree.
pub fn ghz_fidelity_curve(
    budget: &ErrorBudget,
    params: &ScalingParams,
) -> Result<Vec<GhzRow>, ScalingError> {
    params.validate()?;
    check_budget(budget)?;
    (2..=params.n_max)
        .map(|n| {
            let chain = ghz_fidelity(budget, params, Schedule::Chain, n)?;
            let star = ghz_fidelity(budget, params, Schedule::Star, n)?;
            if chain != star {
                return Err(ScalingError::ScheduleMismatch(n));
            }
            Ok(chain)
        })
        .collect()
}
