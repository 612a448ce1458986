mod common;

use reisim::gate::{run_cnot_sequence, GateParams};
use reisim::quantum::{max_abs_diff, PureState};
use reisim::readout::ConfusionMatrix;
use reisim::rng::instance_rng;
use reisim::tomography::{
    measure_all, measure_setting, run_tomography, Basis, MeasurementSetting, TomographyParams,
};

#[test]
fn ideal_tomography_recovers_random_states() {
    let mut rng = instance_rng(7, 0);
    let target = PureState::phi_plus();
    for _ in 0..200 {
        let rho = common::random_density(2, &mut rng);
        let res = run_tomography(&rho, &target, &TomographyParams::ideal(), 0).unwrap();
        assert!(max_abs_diff(res.rho_reconstructed.matrix(), rho.matrix()) < 1e-9);
    }
}

/// `⟨Z⟩` of one qubit from an outcome distribution (qubit 0 is the high bit).
fn marginal_z(probabilities: &[f64; 4], qubit: usize) -> f64 {
    probabilities
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let bit = (i >> (1 - qubit)) & 1;
            if bit == 0 {
                *p
            } else {
                -*p
            }
        })
        .sum()
}

#[test]
fn redundant_marginals_agree() {
    let mut rng = instance_rng(7, 1);
    let confusion = ConfusionMatrix::new(3e-3, 1e-3).unwrap();
    let bases = [Basis::X, Basis::Y, Basis::Z];
    for _ in 0..50 {
        let rho = common::random_density(2, &mut rng);
        for fixed in bases {
            let first: Vec<f64> = bases
                .iter()
                .map(|&b| {
                    let o =
                        measure_setting(&rho, MeasurementSetting::new(fixed, b), 8e-4, &confusion);
                    marginal_z(&o.unwrap().probabilities, 0)
                })
                .collect();
            let second: Vec<f64> = bases
                .iter()
                .map(|&b| {
                    let o =
                        measure_setting(&rho, MeasurementSetting::new(b, fixed), 8e-4, &confusion);
                    marginal_z(&o.unwrap().probabilities, 1)
                })
                .collect();
            for v in [first, second] {
                assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-12), "{v:?}");
            }
        }
    }
}

#[test]
fn outcome_distributions_are_normalized() {
    let mut rng = instance_rng(7, 2);
    let confusion = ConfusionMatrix::new(0.05, 0.02).unwrap();
    for _ in 0..50 {
        let rho = common::random_density(2, &mut rng);
        for o in measure_all(&rho, 0.01, &confusion).unwrap() {
            assert!((o.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(o.probabilities.iter().all(|&p| p >= -1e-15));
        }
    }
}

#[test]
fn fidelity_degrades_with_rotation_and_readout_error() {
    let gate = GateParams::default();
    let (rho, _) = run_cnot_sequence(&gate).unwrap();
    let target = gate.rotation_axis.target_state();
    let fid = |rotation_error: f64, p10: f64| {
        let params = TomographyParams {
            rotation_error,
            confusion: ConfusionMatrix::new(p10, 0.0).unwrap(),
            shots: None,
        };
        run_tomography(&rho, &target, &params, 0)
            .unwrap()
            .fidelity_with_readout
    };
    let mut last = f64::INFINITY;
    for k in 0..5 {
        let f = fid(4e-4 * k as f64, 2e-3);
        assert!(f <= last + 1e-15, "rotation step {k}");
        last = f;
    }
    let mut last = f64::INFINITY;
    for k in 0..5 {
        let f = fid(8e-4, 1e-3 * k as f64);
        assert!(f <= last + 1e-15, "confusion step {k}");
        last = f;
    }
}

#[test]
fn finite_shots_converge_to_exact_result() {
    let gate = GateParams::default();
    let (rho, _) = run_cnot_sequence(&gate).unwrap();
    let target = gate.rotation_axis.target_state();
    let exact = run_tomography(&rho, &target, &TomographyParams::default(), 0).unwrap();
    let sampled = run_tomography(
        &rho,
        &target,
        &TomographyParams {
            shots: Some(1_000_000),
            ..TomographyParams::default()
        },
        3,
    )
    .unwrap();
    // Binomial spread of a near-unit fidelity estimate at 1e6 shots.
    assert!((exact.fidelity_with_readout - sampled.fidelity_with_readout).abs() < 2e-3);
    for (obs, e) in &exact.expectations {
        assert!((e - sampled.expectations[obs]).abs() < 5e-3, "{obs:?}");
    }
}
