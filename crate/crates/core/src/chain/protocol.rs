use std::cell::Cell;
use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{ChainError, InteractionGraph, NodeId, Species};
use crate::rng::instance_rng;

/// Pulses of a readout cycle with the qubit directly next to the buffer:
/// excite qubit, conditionally excite buffer, de-excite qubit.
pub const BASE_PULSES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pulse {
    /// Excites the ion unless an excited neighbor shifts it off resonance.
    Excite(NodeId),
    /// Returns an excited ion to the ground state, with the same blockade
    /// condition; does nothing to an ion in the ground state.
    Deexcite(NodeId),
}

/// Everything the laboratory can observe: which readout ions fluoresce,
/// which qubit frequency channels exist, and whether a readout ion still
/// fluoresces after a pulse sequence applied from the ground state.
pub trait FluorescenceOracle {
    fn readout_ions(&self) -> Vec<NodeId>;
    /// Qubit channels in scan order.
    fn qubit_channels(&self) -> Vec<NodeId>;
    fn fluoresces(&self, readout: NodeId, pulses: &[Pulse]) -> bool;
}

/// Oracle backed by a known interaction graph.
pub struct GraphOracle<'a> {
    graph: &'a InteractionGraph,
    queries: Cell<u64>,
}

impl<'a> GraphOracle<'a> {
    pub fn new(graph: &'a InteractionGraph) -> Self {
        Self {
            graph,
            queries: Cell::new(0),
        }
    }

    /// Number of fluorescence measurements performed so far.
    pub fn queries(&self) -> u64 {
        self.queries.get()
    }

    fn scan_order(&self, species: Species) -> Vec<NodeId> {
        let nodes = self.graph.nodes();
        let mut ids: Vec<NodeId> = self.graph.ids_of(species).collect();
        ids.sort_by(|&a, &b| {
            nodes[a]
                .resonance_offset
                .total_cmp(&nodes[b].resonance_offset)
                .then(a.cmp(&b))
        });
        ids
    }
}

impl FluorescenceOracle for GraphOracle<'_> {
    fn readout_ions(&self) -> Vec<NodeId> {
        self.scan_order(Species::Readout)
    }

    fn qubit_channels(&self) -> Vec<NodeId> {
        self.scan_order(Species::Qubit)
    }

    fn fluoresces(&self, readout: NodeId, pulses: &[Pulse]) -> bool {
        self.queries.set(self.queries.get() + 1);
        let mut excited: HashSet<NodeId> = HashSet::new();
        let blocked = |ion: NodeId, excited: &HashSet<NodeId>| {
            self.graph
                .neighbors(ion)
                .iter()
                .any(|n| excited.contains(n))
        };
        for pulse in pulses {
            match *pulse {
                Pulse::Excite(ion) => {
                    if !excited.contains(&ion) && !blocked(ion, &excited) {
                        excited.insert(ion);
                    }
                }
                Pulse::Deexcite(ion) => {
                    if excited.contains(&ion) && !blocked(ion, &excited) {
                        excited.remove(&ion);
                    }
                }
            }
        }
        !excited.contains(&readout) && !blocked(readout, &excited)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainQubit {
    pub node: NodeId,
    /// 0 for qubits that control the buffer directly.
    pub layer: usize,
    /// The buffer, or the chain qubit one layer closer to it.
    pub controls: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainPlan {
    pub readout: NodeId,
    pub buffer: NodeId,
    pub qubits: Vec<ChainQubit>,
    /// Deepest layer in use.
    pub layers: usize,
    pub pulse_count: usize,
}

impl ChainPlan {
    /// Checks the plan against the true graph; returns the first violation.
    pub fn validate(&self, graph: &InteractionGraph) -> Result<(), String> {
        let n = graph.node_count();
        let in_graph = |id: NodeId| id < n;
        if !in_graph(self.readout) || graph.species(self.readout) != Species::Readout {
            return Err(format!("node {} is not a readout ion", self.readout));
        }
        if !in_graph(self.buffer) || graph.species(self.buffer) != Species::Qubit {
            return Err(format!("buffer {} is not a qubit-species ion", self.buffer));
        }
        if !graph.has_edge(self.buffer, self.readout) {
            return Err("buffer does not shift the readout ion".into());
        }
        let mut layer_of: HashMap<NodeId, Option<usize>> = HashMap::new();
        layer_of.insert(self.buffer, None);
        for q in &self.qubits {
            if !in_graph(q.node) || graph.species(q.node) != Species::Qubit {
                return Err(format!("qubit {} is not a qubit-species ion", q.node));
            }
            if layer_of.contains_key(&q.node) {
                return Err(format!("node {} appears twice", q.node));
            }
            let expected = match layer_of.get(&q.controls) {
                Some(None) => 0,
                Some(Some(l)) => l + 1,
                None => return Err(format!("qubit {} controls an unknown member", q.node)),
            };
            if q.layer != expected {
                return Err(format!(
                    "qubit {} has layer {} instead of {expected}",
                    q.node, q.layer
                ));
            }
            if !graph.has_edge(q.node, q.controls) {
                return Err(format!("qubit {} does not shift {}", q.node, q.controls));
            }
            layer_of.insert(q.node, Some(q.layer));
        }
        let deepest = self.qubits.iter().map(|q| q.layer).max().unwrap_or(0);
        if self.layers != deepest {
            return Err(format!(
                "layers {} but deepest qubit is at {deepest}",
                self.layers
            ));
        }
        if self.pulse_count != BASE_PULSES + self.layers {
            return Err("pulse count does not match the layer count".into());
        }
        Ok(())
    }
}

/// Runs the search on `graph` through a [`GraphOracle`].
pub fn discover_chain(
    graph: &InteractionGraph,
    target_length: usize,
    seed: u64,
) -> Result<ChainPlan, ChainError> {
    discover_chain_with(&GraphOracle::new(graph), target_length, seed)
}

struct Member {
    node: NodeId,
    /// `None` for the buffer.
    layer: Option<usize>,
    /// Index of the controlled member.
    parent: Option<usize>,
}

struct Search<'o, O: FluorescenceOracle> {
    oracle: &'o O,
    readout: NodeId,
    members: Vec<Member>,
}

impl<O: FluorescenceOracle> Search<'_, O> {
    /// Excitation pulses from member `idx` down to the buffer.
    fn path(&self, idx: usize) -> Vec<Pulse> {
        let mut pulses = Vec::new();
        let mut cur = Some(idx);
        while let Some(i) = cur {
            pulses.push(Pulse::Excite(self.members[i].node));
            cur = self.members[i].parent;
        }
        pulses
    }

    /// Whether exciting member `idx` changes what the readout shows.
    fn transparent(&self, idx: usize) -> bool {
        let path = self.path(idx);
        self.oracle.fluoresces(self.readout, &path)
            != self.oracle.fluoresces(self.readout, &path[1..])
    }

    /// `candidate` blocks member `idx`: with the candidate excited first and
    /// de-excited right after the member's pulse, the readout differs from
    /// the sequence without the candidate. Only the member's own excitation
    /// can differ between the two runs, so a difference proves the edge.
    fn controls(&self, idx: usize, candidate: NodeId) -> bool {
        let path = self.path(idx);
        let mut probe = Vec::with_capacity(path.len() + 2);
        probe.push(Pulse::Excite(candidate));
        probe.push(path[0]);
        probe.push(Pulse::Deexcite(candidate));
        probe.extend_from_slice(&path[1..]);
        self.oracle.fluoresces(self.readout, &probe) != self.oracle.fluoresces(self.readout, &path)
    }

    fn used(&self, node: NodeId) -> bool {
        self.members.iter().any(|m| m.node == node)
    }

    fn add(&mut self, node: NodeId, parent: usize) {
        let layer = self.members[parent].layer.map_or(0, |l| l + 1);
        self.members.push(Member {
            node,
            layer: Some(layer),
            parent: Some(parent),
        });
    }

    fn grow(&mut self, channels: &[NodeId], target: usize) -> bool {
        // Direct controllers of the buffer.
        for &q in channels {
            if self.members.len() > target {
                break;
            }
            if !self.used(q) && self.controls(0, q) {
                self.add(q, 0);
            }
        }
        // Nested layers, starting from the most recently added qubit.
        let mut opaque = HashSet::new();
        while self.members.len() <= target {
            let mut attached = false;
            for idx in (1..self.members.len()).rev() {
                if opaque.contains(&idx) {
                    continue;
                }
                if !self.transparent(idx) {
                    opaque.insert(idx);
                    continue;
                }
                if let Some(&q) = channels
                    .iter()
                    .find(|&&q| !self.used(q) && self.controls(idx, q))
                {
                    self.add(q, idx);
                    attached = true;
                    break;
                }
                opaque.insert(idx);
            }
            if !attached {
                return false;
            }
        }
        true
    }
}

/// Searches for a readout ion, a buffer and `target_length` qubits using
/// only fluorescence measurements. Readout ions are tried in an order
/// shuffled by `seed`; buffers and qubits are taken in scan order.
pub fn discover_chain_with<O: FluorescenceOracle>(
    oracle: &O,
    target_length: usize,
    seed: u64,
) -> Result<ChainPlan, ChainError> {
    if target_length == 0 {
        return Err(ChainError::invalid("target_length", "must be at least 1"));
    }
    let mut readouts = oracle.readout_ions();
    if readouts.is_empty() {
        return Err(ChainError::NoReadout);
    }
    readouts.shuffle(&mut instance_rng(seed, 1));
    let channels = oracle.qubit_channels();
    for &readout in &readouts {
        for &buffer in &channels {
            if oracle.fluoresces(readout, &[Pulse::Excite(buffer)]) {
                continue;
            }
            let mut search = Search {
                oracle,
                readout,
                members: vec![Member {
                    node: buffer,
                    layer: None,
                    parent: None,
                }],
            };
            if search.grow(&channels, target_length) {
                let qubits: Vec<ChainQubit> = search.members[1..=target_length]
                    .iter()
                    .map(|m| ChainQubit {
                        node: m.node,
                        layer: m.layer.expect("chain members have a layer"),
                        controls: search.members[m.parent.expect("chain members have a parent")]
                            .node,
                    })
                    .collect();
                let layers = qubits.iter().map(|q| q.layer).max().unwrap_or(0);
                return Ok(ChainPlan {
                    readout,
                    buffer,
                    qubits,
                    layers,
                    pulse_count: BASE_PULSES + layers,
                });
            }
        }
    }
    Err(ChainError::NotFound {
        requested: target_length,
    })
}
