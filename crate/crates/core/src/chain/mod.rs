//! Doped-crystal geometry, blockade interaction graphs and the
//! fluorescence-only search for a readout ion, a buffer and a qubit chain.

mod crystal;
mod graph;
mod protocol;

pub use crystal::{generate_crystal, Boundary, Crystal, CrystalParams, IonSite, Species};
pub use graph::{
    build_graph, calibrate_cutoff, mean_qubit_degree, Coupling, CutoffCalibration, Edge,
    InteractionGraph, NodeId, CALIBRATED_CUTOFF,
};
pub use protocol::{
    discover_chain, discover_chain_with, ChainPlan, ChainQubit, FluorescenceOracle, GraphOracle,
    Pulse, BASE_PULSES,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChainError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("crystal region is empty")]
    EmptyRegion,
    #[error("graph has no readout ion")]
    NoReadout,
    #[error("no chain of {requested} qubits could be established")]
    NotFound { requested: usize },
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
}

impl ChainError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        ChainError::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}
