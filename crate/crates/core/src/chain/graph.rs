use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_crystal, Boundary, ChainError, Crystal, CrystalParams, IonSite, Species};

pub type NodeId = usize;

/// Blockade cutoff frozen by [`calibrate_cutoff`] for `c_dipole = 1000` at
/// 4 % doping (mean qubit-qubit degree 5).
pub const CALIBRATED_CUTOFF: f64 = 624.7;

/// Shift between two ions at distance `r` is `c_dipole / r³`; the ions
/// interact when the shift reaches `cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Coupling {
    /// Frequency units · nm³.
    pub c_dipole: f64,
    pub cutoff: f64,
}

impl Default for Coupling {
    fn default() -> Self {
        Self {
            c_dipole: 1000.0,
            cutoff: CALIBRATED_CUTOFF,
        }
    }
}

impl Coupling {
    pub fn validate(&self) -> Result<(), ChainError> {
        if !(self.c_dipole > 0.0 && self.c_dipole.is_finite()) {
            return Err(ChainError::invalid("c_dipole", "must be positive"));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(ChainError::invalid("cutoff", "must be positive"));
        }
        Ok(())
    }

    /// Largest interacting distance.
    pub fn radius(&self) -> f64 {
        (self.c_dipole / self.cutoff).cbrt()
    }

    pub fn shift_at_sq(&self, d2: f64) -> f64 {
        self.c_dipole / (d2 * d2.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub shift: f64,
}

/// Undirected blockade graph. Node ids index `nodes`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionGraph {
    nodes: Vec<IonSite>,
    edges: Vec<Edge>,
    #[serde(skip)]
    adjacency: Vec<Vec<NodeId>>,
}

impl InteractionGraph {
    /// Graph with explicit edges; duplicate and reversed pairs collapse.
    pub fn from_edges(nodes: Vec<IonSite>, edges: &[(NodeId, NodeId)]) -> Result<Self, ChainError> {
        let mut list = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for id in [a, b] {
                if id >= nodes.len() {
                    return Err(ChainError::UnknownNode(id));
                }
            }
            if a == b {
                return Err(ChainError::invalid("edges", "self-loops are not allowed"));
            }
            list.push(Edge {
                a: a.min(b),
                b: a.max(b),
                shift: f64::INFINITY,
            });
        }
        list.sort_by_key(|e| (e.a, e.b));
        list.dedup_by_key(|e| (e.a, e.b));
        Ok(Self::assemble(nodes, list))
    }

    fn assemble(nodes: Vec<IonSite>, edges: Vec<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for e in &edges {
            adjacency[e.a].push(e.b);
            adjacency[e.b].push(e.a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            nodes,
            edges,
            adjacency,
        }
    }

    pub fn nodes(&self) -> &[IonSite] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Edges with `a < b`, sorted.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id]
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency
            .get(a)
            .is_some_and(|n| n.binary_search(&b).is_ok())
    }

    pub fn species(&self, id: NodeId) -> Species {
        self.nodes[id].species
    }

    pub fn ids_of(&self, species: Species) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(move |&i| self.nodes[i].species == species)
    }

    /// Number of qubit neighbors of each qubit node.
    pub fn qubit_degrees(&self) -> Vec<usize> {
        self.ids_of(Species::Qubit)
            .map(|i| {
                self.adjacency[i]
                    .iter()
                    .filter(|&&j| self.nodes[j].species == Species::Qubit)
                    .count()
            })
            .collect()
    }
}

/// Mean number of qubit neighbors per qubit (0 when there are no qubits).
pub fn mean_qubit_degree(graph: &InteractionGraph) -> f64 {
    let degrees = graph.qubit_degrees();
    if degrees.is_empty() {
        0.0
    } else {
        degrees.iter().sum::<usize>() as f64 / degrees.len() as f64
    }
}

struct CellGrid {
    dims: [usize; 3],
    cell_of: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl CellGrid {
    fn new(crystal: &Crystal, radius: f64) -> Self {
        let dims = crystal
            .region
            .map(|l| ((l / radius).floor() as usize).clamp(1, 1 << 10));
        let mut members = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        let cell_of: Vec<usize> = crystal
            .sites
            .iter()
            .map(|s| {
                let c = [0, 1, 2].map(|k| {
                    let f = s.position[k] / crystal.region[k] * dims[k] as f64;
                    (f.max(0.0) as usize).min(dims[k] - 1)
                });
                (c[0] * dims[1] + c[1]) * dims[2] + c[2]
            })
            .collect();
        for (i, &c) in cell_of.iter().enumerate() {
            members[c].push(i);
        }
        Self {
            dims,
            cell_of,
            members,
        }
    }

    /// Cells adjacent to `cell` (itself included), each listed once.
    fn neighborhood(&self, cell: usize, periodic: bool) -> Vec<usize> {
        let d = self.dims;
        let coord = [cell / (d[1] * d[2]), (cell / d[2]) % d[1], cell % d[2]];
        let mut out = Vec::with_capacity(27);
        for dx in -1i64..=1 {
            for dy in -1i64..=1 {
                for dz in -1i64..=1 {
                    let mut c = [0usize; 3];
                    let mut inside = true;
                    for (k, delta) in [dx, dy, dz].into_iter().enumerate() {
                        let v = coord[k] as i64 + delta;
                        let n = d[k] as i64;
                        if periodic {
                            c[k] = v.rem_euclid(n) as usize;
                        } else if (0..n).contains(&v) {
                            c[k] = v as usize;
                        } else {
                            inside = false;
                        }
                    }
                    if inside {
                        out.push((c[0] * d[1] + c[1]) * d[2] + c[2]);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Pairs `(i, j, d²)` with `i < j` and `d ≤ radius`, in ascending `(i, j)`.
fn pairs_within<F>(crystal: &Crystal, radius: f64, keep: F) -> Vec<(usize, usize, f64)>
where
    F: Fn(usize, usize) -> bool + Sync,
{
    let grid = CellGrid::new(crystal, radius);
    let periodic = crystal.boundary == Boundary::Periodic;
    let r2 = radius * radius;
    (0..crystal.sites.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut found = Vec::new();
            for cell in grid.neighborhood(grid.cell_of[i], periodic) {
                for &j in &grid.members[cell] {
                    if j <= i || !keep(i, j) {
                        continue;
                    }
                    let d2 =
                        crystal.distance_sq(&crystal.sites[i].position, &crystal.sites[j].position);
                    if d2 <= r2 {
                        found.push((i, j, d2));
                    }
                }
            }
            found.sort_by_key(|&(_, j, _)| j);
            found
        })
        .collect()
}

/// Blockade graph of `crystal`: an edge joins every pair whose shift
/// `c_dipole / r³` is at least `cutoff`.
pub fn build_graph(crystal: &Crystal, coupling: &Coupling) -> Result<InteractionGraph, ChainError> {
    coupling.validate()?;
    // Slightly generous search radius; the exact shift test below decides.
    let radius = coupling.radius() * (1.0 + 1e-9);
    let edges = pairs_within(crystal, radius, |_, _| true)
        .into_iter()
        .filter_map(|(a, b, d2)| {
            let shift = coupling.shift_at_sq(d2);
            (shift >= coupling.cutoff).then_some(Edge { a, b, shift })
        })
        .collect();
    Ok(InteractionGraph::assemble(crystal.sites.clone(), edges))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffCalibration {
    pub c_dipole: f64,
    pub cutoff: f64,
    pub radius: f64,
    /// Mean qubit-qubit degree over the calibration ensemble at `cutoff`.
    pub mean_degree: f64,
    pub n_crystals: usize,
}

/// Chooses the cutoff giving mean qubit-qubit degree `target` over
/// `n_crystals` crystals (seeds `seed..seed+n_crystals`). The pooled pair
/// distances are sorted and the cutoff is placed between the order
/// statistics that bound the required pair count; it is then rounded to
/// four significant digits.
pub fn calibrate_cutoff(
    params: &CrystalParams,
    c_dipole: f64,
    target: f64,
    n_crystals: usize,
    seed: u64,
) -> Result<CutoffCalibration, ChainError> {
    if n_crystals == 0 {
        return Err(ChainError::invalid("n_crystals", "must be at least 1"));
    }
    if !(target > 0.0) {
        return Err(ChainError::invalid("target", "must be positive"));
    }
    let crystals: Vec<Crystal> = (0..n_crystals as u64)
        .map(|k| generate_crystal(params, seed.wrapping_add(k)))
        .collect::<Result<_, _>>()?;
    let n_qubits: usize = crystals.iter().map(|c| c.count(Species::Qubit)).sum();
    if n_qubits == 0 {
        return Err(ChainError::invalid(
            "doping",
            "calibration needs qubit ions",
        ));
    }
    let needed = (target * n_qubits as f64 / 2.0).round() as usize;
    let density = n_qubits as f64 / (n_crystals as f64 * params.volume());
    let mut radius = (3.0 * target / (4.0 * std::f64::consts::PI * density)).cbrt() * 1.5;
    let distances = loop {
        let mut d2: Vec<f64> = crystals
            .iter()
            .flat_map(|c| {
                pairs_within(c, radius, |i, j| {
                    c.sites[i].species == Species::Qubit && c.sites[j].species == Species::Qubit
                })
            })
            .map(|(_, _, d2)| d2)
            .collect();
        if d2.len() > needed {
            d2.sort_by(f64::total_cmp);
            break d2;
        }
        radius *= 2.0;
    };
    let r3 = if needed == 0 {
        distances[0].powf(1.5) * 0.5
    } else {
        0.5 * (distances[needed - 1].powf(1.5) + distances[needed].powf(1.5))
    };
    let cutoff = round_sig(c_dipole / r3, 4);
    let coupling = Coupling { c_dipole, cutoff };
    let within = distances
        .iter()
        .take_while(|&&d2| coupling.shift_at_sq(d2) >= cutoff)
        .count();
    Ok(CutoffCalibration {
        c_dipole,
        cutoff,
        radius: coupling.radius(),
        mean_degree: 2.0 * within as f64 / n_qubits as f64,
        n_crystals,
    })
}

fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn site(x: f64) -> IonSite {
        IonSite {
            position: [x, 0.0, 0.0],
            species: Species::Qubit,
            resonance_offset: 0.0,
        }
    }

    fn open(sites: Vec<IonSite>) -> Crystal {
        Crystal {
            region: [10.0, 10.0, 10.0],
            boundary: Boundary::Open,
            sites,
        }
    }

    #[test]
    fn boundary_distance_is_an_edge() {
        // 8 / 2³ = 1 exactly.
        let c = open(vec![site(1.0), site(3.0)]);
        let g = build_graph(
            &c,
            &Coupling {
                c_dipole: 8.0,
                cutoff: 1.0,
            },
        )
        .unwrap();
        assert_eq!(g.edges().len(), 1);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert_eq!(g.edges()[0].shift, 1.0);
        let g = build_graph(
            &c,
            &Coupling {
                c_dipole: 8.0,
                cutoff: 1.0 + 1e-12,
            },
        )
        .unwrap();
        assert!(g.edges().is_empty());
    }

    #[test]
    fn single_ion_has_no_edges() {
        let g = build_graph(&open(vec![site(5.0)]), &Coupling::default()).unwrap();
        assert!(g.edges().is_empty());
        assert_eq!(mean_qubit_degree(&g), 0.0);
    }

    #[test]
    fn periodic_edges_cross_the_faces() {
        let c = Crystal {
            region: [10.0, 10.0, 10.0],
            boundary: Boundary::Periodic,
            sites: vec![site(0.2), site(9.8)],
        };
        let g = build_graph(
            &c,
            &Coupling {
                c_dipole: 1.0,
                cutoff: 1.0,
            },
        )
        .unwrap();
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn from_edges_normalizes() {
        let nodes = vec![site(0.0), site(1.0), site(2.0)];
        let g = InteractionGraph::from_edges(nodes.clone(), &[(1, 0), (0, 1), (2, 1)]).unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert!(InteractionGraph::from_edges(nodes.clone(), &[(0, 0)]).is_err());
        assert!(InteractionGraph::from_edges(nodes, &[(0, 7)]).is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(627.345, 4), 627.3);
        assert_eq!(round_sig(0.012345, 2), 0.012);
    }

    #[test]
    fn graph_json_lists_nodes_and_edges() {
        let g = build_graph(
            &open(vec![site(1.0), site(3.0)]),
            &Coupling {
                c_dipole: 8.0,
                cutoff: 1.0,
            },
        )
        .unwrap();
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 2);
        assert_eq!(v["edges"][0]["b"], 1);
        assert!(v.get("adjacency").is_none());
    }
}
