use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::ChainError;
use crate::rng::instance_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    Qubit,
    Readout,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IonSite {
    /// Position in nanometers.
    pub position: [f64; 3],
    pub species: Species,
    /// Place in the inhomogeneous band, in `[0, 1)`.
    pub resonance_offset: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Minimum-image distances across the box faces.
    #[default]
    Periodic,
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrystalParams {
    /// Box edge lengths (nm).
    pub region: [f64; 3],
    /// Host sites available for substitution per nm³.
    pub site_density: f64,
    /// Fraction of host sites holding a qubit ion.
    pub doping: f64,
    /// Fraction of the remaining host sites holding a readout ion.
    pub trace_readout_density: f64,
    pub boundary: Boundary,
}

impl Default for CrystalParams {
    fn default() -> Self {
        Self {
            region: [15.0, 15.0, 15.0],
            site_density: 18.7,
            doping: 0.04,
            trace_readout_density: 5e-4,
            boundary: Boundary::Periodic,
        }
    }
}

impl CrystalParams {
    pub fn volume(&self) -> f64 {
        self.region.iter().product()
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        if self.region.iter().any(|&l| !(l.is_finite() && l >= 0.0)) {
            return Err(ChainError::invalid(
                "region",
                "edges must be finite and non-negative",
            ));
        }
        if self.volume() <= 0.0 {
            return Err(ChainError::EmptyRegion);
        }
        if !(self.site_density > 0.0 && self.site_density.is_finite()) {
            return Err(ChainError::invalid("site_density", "must be positive"));
        }
        for (name, v) in [
            ("doping", self.doping),
            ("trace_readout_density", self.trace_readout_density),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ChainError::invalid(name, "must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Ion positions together with the box they live in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crystal {
    pub region: [f64; 3],
    pub boundary: Boundary,
    pub sites: Vec<IonSite>,
}

impl Crystal {
    pub fn count(&self, species: Species) -> usize {
        self.sites.iter().filter(|s| s.species == species).count()
    }

    /// Squared distance between two positions under the box boundary rule.
    pub fn distance_sq(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        (0..3)
            .map(|k| {
                let mut d = (a[k] - b[k]).abs();
                if self.boundary == Boundary::Periodic {
                    d = d.min(self.region[k] - d);
                }
                d * d
            })
            .sum()
    }
}

/// Host sites fill the box at `site_density`; each is independently a
/// qubit with probability `doping`, otherwise a readout ion with
/// probability `trace_readout_density`. Positions are uniform in the box.
pub fn generate_crystal(params: &CrystalParams, seed: u64) -> Result<Crystal, ChainError> {
    params.validate()?;
    let mut rng = instance_rng(seed, 0);
    let n_sites = (params.volume() * params.site_density).round() as u64;
    let n_qubits = Binomial::new(n_sites, params.doping)
        .expect("doping validated")
        .sample(&mut rng);
    let n_readout = Binomial::new(n_sites - n_qubits, params.trace_readout_density)
        .expect("density validated")
        .sample(&mut rng);
    let mut sites = Vec::with_capacity((n_qubits + n_readout) as usize);
    for (species, count) in [(Species::Qubit, n_qubits), (Species::Readout, n_readout)] {
        for _ in 0..count {
            let position = [
                rng.random::<f64>() * params.region[0],
                rng.random::<f64>() * params.region[1],
                rng.random::<f64>() * params.region[2],
            ];
            sites.push(IonSite {
                position,
                species,
                resonance_offset: rng.random(),
            });
        }
    }
    Ok(Crystal {
        region: params.region,
        boundary: params.boundary,
        sites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undoped_crystal_has_no_qubits() {
        let p = CrystalParams {
            doping: 0.0,
            ..CrystalParams::default()
        };
        assert_eq!(generate_crystal(&p, 1).unwrap().count(Species::Qubit), 0);
    }

    #[test]
    fn counts_follow_densities() {
        let p = CrystalParams::default();
        let c = generate_crystal(&p, 2).unwrap();
        let expected = p.volume() * p.site_density * p.doping;
        let n = c.count(Species::Qubit) as f64;
        assert!((n - expected).abs() < 5.0 * expected.sqrt());
        for s in &c.sites {
            for k in 0..3 {
                assert!((0.0..p.region[k]).contains(&s.position[k]));
            }
            assert!((0.0..1.0).contains(&s.resonance_offset));
        }
    }

    #[test]
    fn same_seed_same_crystal() {
        let p = CrystalParams::default();
        assert_eq!(
            generate_crystal(&p, 9).unwrap(),
            generate_crystal(&p, 9).unwrap()
        );
        assert_ne!(
            generate_crystal(&p, 9).unwrap(),
            generate_crystal(&p, 10).unwrap()
        );
    }

    #[test]
    fn empty_region_is_rejected() {
        let p = CrystalParams {
            region: [10.0, 0.0, 10.0],
            ..CrystalParams::default()
        };
        assert_eq!(generate_crystal(&p, 0), Err(ChainError::EmptyRegion));
    }

    #[test]
    fn periodic_distance_wraps() {
        let c = Crystal {
            region: [10.0, 10.0, 10.0],
            boundary: Boundary::Periodic,
            sites: vec![],
        };
        assert!((c.distance_sq(&[0.5, 0.0, 0.0], &[9.5, 0.0, 0.0]) - 1.0).abs() < 1e-12);
        let open = Crystal {
            boundary: Boundary::Open,
            ..c
        };
        assert!((open.distance_sq(&[0.5, 0.0, 0.0], &[9.5, 0.0, 0.0]) - 81.0).abs() < 1e-12);
    }
}
