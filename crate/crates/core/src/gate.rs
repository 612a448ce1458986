//! Noisy CNOT sequence producing a two-qubit Bell state.
//!
//! The sequence follows the laboratory steps: initialization, a π/2
//! rotation of the control, excitation of the control to `|e⟩`, the
//! blockade-conditioned NOT on the target, and de-excitation. The excursion
//! to `|e⟩` is not modeled as a third level; it contributes pulse errors and
//! one amplitude-damping channel on the control.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::quantum::{
    cnot, fidelity, rx, ry, ChannelKind, DensityMatrix, FlipModel, NoiseChannel, PureState,
    QuantumError, MAX_DENSITY_QUBITS,
};

pub const CONTROL: usize = 0;
pub const TARGET: usize = 1;

/// Axis of the control's π/2 rotation. It fixes which Bell state is the
/// ideal output and which pulse errors are visible before the entangling
/// step: after `Ry(π/2)` the control is an X eigenstate and bit flips on it
/// act trivially; after `Rx(π/2)` neither flip commutes with the state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationAxis {
    /// Resonant pulse with real Rabi frequency; target `(|00⟩ − i|11⟩)/√2`.
    #[default]
    X,
    /// Target `|Φ+⟩ = (|00⟩ + |11⟩)/√2`.
    Y,
}

impl RotationAxis {
    fn half_pi(self) -> crate::quantum::CMatrix {
        match self {
            RotationAxis::X => rx(FRAC_PI_2),
            RotationAxis::Y => ry(FRAC_PI_2),
        }
    }

    /// Ideal state produced by the sequence.
    pub fn target_state(self) -> PureState {
        let zero = PureState::basis(2, 0).expect("two-qubit basis state");
        zero.apply_unitary(&self.half_pi(), &[CONTROL])
            .and_then(|s| s.apply_unitary(&cnot(), &[CONTROL, TARGET]))
            .expect("ideal gates act on a two-qubit register")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateParams {
    /// Probability that a freshly initialized qubit is in the wrong level.
    pub p_init: f64,
    /// Bit- and phase-flip probability of one transfer pulse.
    pub p_transfer: f64,
    /// Bit- and phase-flip probability of a single-qubit gate (two pulses).
    pub p_single_qubit_gate: f64,
    /// Time the control spends in `|e⟩` (s).
    pub t_excited_control: f64,
    pub t1_qubit: f64,
    pub flip_model: FlipModel,
    pub rotation_axis: RotationAxis,
}

impl Default for GateParams {
    fn default() -> Self {
        Self {
            p_init: 4e-4,
            p_transfer: 4e-4,
            p_single_qubit_gate: 8e-4,
            t_excited_control: 1.6e-6,
            t1_qubit: 1.9e-3,
            flip_model: FlipModel::Sequential,
            rotation_axis: RotationAxis::X,
        }
    }
}

impl GateParams {
    /// Every error source switched off.
    pub fn ideal() -> Self {
        Self {
            p_init: 0.0,
            p_transfer: 0.0,
            p_single_qubit_gate: 0.0,
            t_excited_control: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        for (name, v) in [
            ("p_init", self.p_init),
            ("p_transfer", self.p_transfer),
            ("p_single_qubit_gate", self.p_single_qubit_gate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(QuantumError::Domain { name, value: v });
            }
        }
        if !(self.t1_qubit > 0.0) {
            return Err(QuantumError::Domain {
                name: "t1_qubit",
                value: self.t1_qubit,
            });
        }
        if !(self.t_excited_control >= 0.0 && self.t_excited_control < self.t1_qubit) {
            return Err(QuantumError::Domain {
                name: "t_excited_control",
                value: self.t_excited_control,
            });
        }
        Ok(())
    }

    /// `1 − exp(−t_excited / T1)`.
    pub fn damping_gamma(&self) -> f64 {
        -(-self.t_excited_control / self.t1_qubit).exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Initialization,
    SuperpositionPulse,
    ExcitationPulse,
    TargetNot,
    ExcitedStateDecay,
    DeexcitationPulse,
}

/// One error channel of the sequence. `fidelity` is measured against the
/// ideal (noise-free) state at the same point of the sequence, so unitary
/// steps leave it unchanged and the drops sum to `1 − F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: Step,
    pub channel: ChannelKind,
    pub parameter: f64,
    pub qubit: usize,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SequenceTrace {
    pub entries: Vec<TraceEntry>,
}

impl SequenceTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Fidelity lost in each entry, in order.
    pub fn drops(&self) -> Vec<f64> {
        let mut previous = 1.0;
        self.entries
            .iter()
            .map(|e| {
                let d = previous - e.fidelity;
                previous = e.fidelity;
                d
            })
            .collect()
    }

    /// Total fidelity lost in entries belonging to `step`.
    pub fn deficit_of(&self, step: Step) -> f64 {
        self.entries
            .iter()
            .zip(self.drops())
            .filter(|(e, _)| e.step == step)
            .map(|(_, d)| d)
            .sum()
    }
}

/// Tensor power of `diag(1 − p, p)`.
pub fn initialize(n_qubits: usize, p_init: f64) -> Result<DensityMatrix, QuantumError> {
    if n_qubits == 0 || n_qubits > MAX_DENSITY_QUBITS {
        return Err(QuantumError::TooManyQubits {
            requested: n_qubits,
            max: MAX_DENSITY_QUBITS,
        });
    }
    let single = DensityMatrix::diagonal(&[1.0 - p_init, p_init])?;
    let mut rho = single.clone();
    for _ in 1..n_qubits {
        rho = rho.tensor(&single);
    }
    Ok(rho)
}

struct Runner {
    rho: DensityMatrix,
    ideal: PureState,
    trace: SequenceTrace,
}

impl Runner {
    fn unitary(
        &mut self,
        u: &crate::quantum::CMatrix,
        targets: &[usize],
    ) -> Result<(), QuantumError> {
        self.rho = self.rho.apply_unitary(u, targets)?;
        self.ideal = self.ideal.apply_unitary(u, targets)?;
        Ok(())
    }

    fn channel(&mut self, step: Step, ch: NoiseChannel, qubit: usize) -> Result<(), QuantumError> {
        self.rho = self.rho.apply_channel(&ch, &[qubit])?;
        self.trace.entries.push(TraceEntry {
            step,
            channel: ch.kind(),
            parameter: ch.parameter(),
            qubit,
            fidelity: fidelity(&self.rho, &self.ideal)?,
        });
        Ok(())
    }

    fn pulse_error(
        &mut self,
        step: Step,
        model: FlipModel,
        p: f64,
        qubit: usize,
    ) -> Result<(), QuantumError> {
        for ch in model.channels(p)? {
            self.channel(step, ch, qubit)?;
        }
        Ok(())
    }
}

/// Runs the full error-bearing CNOT sequence and returns `ρ_f` with its trace.
pub fn run_cnot_sequence(
    params: &GateParams,
) -> Result<(DensityMatrix, SequenceTrace), QuantumError> {
    params.validate()?;
    let ground = PureState::basis(2, 0)?;
    let mut run = Runner {
        rho: ground.to_density(),
        ideal: ground,
        trace: SequenceTrace::default(),
    };
    let model = params.flip_model;

    // Wrong-level population after optical pumping, one channel per qubit.
    for q in [CONTROL, TARGET] {
        run.channel(
            Step::Initialization,
            NoiseChannel::bit_flip(params.p_init)?,
            q,
        )?;
    }

    run.unitary(&params.rotation_axis.half_pi(), &[CONTROL])?;
    run.pulse_error(
        Step::SuperpositionPulse,
        model,
        params.p_single_qubit_gate,
        CONTROL,
    )?;

    run.pulse_error(Step::ExcitationPulse, model, params.p_transfer, CONTROL)?;

    run.unitary(&cnot(), &[CONTROL, TARGET])?;
    run.pulse_error(Step::TargetNot, model, params.p_single_qubit_gate, TARGET)?;
    run.channel(
        Step::ExcitedStateDecay,
        NoiseChannel::amplitude_damping(params.damping_gamma())?,
        CONTROL,
    )?;

    run.pulse_error(Step::DeexcitationPulse, model, params.p_transfer, CONTROL)?;

    Ok((run.rho, run.trace))
}

/// Fidelity of `rho_f` with the Bell state selected by `axis`.
pub fn bell_fidelity(rho_f: &DensityMatrix, axis: RotationAxis) -> Result<f64, QuantumError> {
    fidelity(rho_f, &axis.target_state())
}

/// Per-step split of the CNOT infidelity, read off a sequence trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    /// Initialization error per qubit.
    pub init_per_qubit: f64,
    /// π/2 pulse creating the superposition on the first control.
    pub superposition: f64,
    /// One CNOT excluding initialization and the π/2 pulse.
    pub cnot_core: f64,
}

impl ErrorBudget {
    pub fn from_trace(trace: &SequenceTrace) -> Self {
        let core = [
            Step::ExcitationPulse,
            Step::TargetNot,
            Step::ExcitedStateDecay,
            Step::DeexcitationPulse,
        ];
        Self {
            init_per_qubit: trace.deficit_of(Step::Initialization) / 2.0,
            superposition: trace.deficit_of(Step::SuperpositionPulse),
            cnot_core: core.iter().map(|&s| trace.deficit_of(s)).sum(),
        }
    }

    pub fn from_params(params: &GateParams) -> Result<Self, QuantumError> {
        Ok(Self::from_trace(&run_cnot_sequence(params)?.1))
    }

    pub fn two_qubit_total(&self) -> f64 {
        2.0 * self.init_per_qubit + self.superposition + self.cnot_core
    }
}
