//! Simulation toolkit for single-ion readout and few-qubit gates in
//! rare-earth-doped crystals.
//!
//! * [`quantum`]: density matrices, Kraus channels and fidelity.
//! * [`readout`]: photon-counting Monte Carlo for direct and buffered readout.
//! * [`gate`]: the noisy CNOT sequence that prepares a Bell state.
//! * [`tomography`]: two-qubit tomography through an imperfect readout.
//! * [`scaling`]: first-order GHZ fidelity predictions.
//! * [`chain`]: crystal generation, interaction graphs and chain discovery.
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod gate;
pub mod quantum;
pub mod readout;
pub mod rng;
pub mod scaling;
pub mod tomography;
