//! Generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use reisim::chain::{Crystal, InteractionGraph, IonSite, Species};
use reisim::quantum::{CMatrix, DensityMatrix, C64};

/// Full-rank random state `G G† / tr` with Gaussian-ish entries.
pub fn random_density<R: Rng>(n_qubits: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1 << n_qubits;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).expect("G G† is a state")
}

pub fn random_site<R: Rng>(species: Species, rng: &mut R) -> IonSite {
    IonSite {
        position: [rng.random(), rng.random(), rng.random()],
        species,
        resonance_offset: rng.random(),
    }
}

/// Erdős–Rényi graph with a random share of readout ions.
pub fn random_graph<R: Rng>(rng: &mut R) -> InteractionGraph {
    let n = rng.random_range(2..40);
    let p_readout = rng.random_range(0.0..0.2);
    let p_edge = rng.random_range(0.02..0.5);
    let nodes: Vec<IonSite> = (0..n)
        .map(|_| {
            let s = if rng.random_bool(p_readout) {
                Species::Readout
            } else {
                Species::Qubit
            };
            random_site(s, rng)
        })
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p_edge) {
                edges.push((a, b));
            }
        }
    }
    InteractionGraph::from_edges(nodes, &edges).expect("edges are in range")
}

/// O(n²) edge set of `crystal` under a `c / r³ ≥ cutoff` rule.
pub fn brute_force_edges(
    crystal: &Crystal,
    c_dipole: f64,
    cutoff: f64,
) -> BTreeSet<(usize, usize)> {
    let s = &crystal.sites;
    let mut out = BTreeSet::new();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let d2 = crystal.distance_sq(&s[i].position, &s[j].position);
            if c_dipole / d2.powf(1.5) >= cutoff {
                out.insert((i, j));
            }
        }
    }
    out
}

pub fn edge_set(graph: &InteractionGraph) -> BTreeSet<(usize, usize)> {
    graph
        .edges()
        .iter()
        .map(|e| (e.a.min(e.b), e.a.max(e.b)))
        .collect()
}
