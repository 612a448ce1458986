mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reisim::quantum::{
    expectation, fidelity, hermitian_deviation, max_abs_diff, project_physical, rx, ry, CMatrix,
    CVector, DensityMatrix, NoiseChannel, PauliObservable, PureState, C64, SPECTRAL_TOL,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn assert_state(rho: &DensityMatrix) -> Result<(), TestCaseError> {
    let tr = rho.trace();
    prop_assert!(
        (tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-12,
        "trace {tr}"
    );
    prop_assert!(hermitian_deviation(rho.matrix()) < 1e-12);
    let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
    prop_assert!(min >= -SPECTRAL_TOL, "min eigenvalue {min}");
    Ok(())
}

fn frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn channels_map_states_to_states(
        seed in any::<u64>(),
        n in 1usize..4,
        p in 0.0..=1.0f64,
        q in 0.0..=1.0f64,
        kind in 0usize..5,
    ) {
        let mut r = rng(seed);
        let rho = common::random_density(n, &mut r);
        let ch = match kind {
            0 => NoiseChannel::bit_flip(p),
            1 => NoiseChannel::phase_flip(p),
            2 => NoiseChannel::split_flip(p),
            3 => NoiseChannel::amplitude_damping(p),
            _ => NoiseChannel::confusion(p, q),
        }
        .unwrap();
        prop_assert!(ch.completeness_deviation() < SPECTRAL_TOL);
        for target in 0..n {
            assert_state(&rho.apply_channel(&ch, &[target]).unwrap())?;
        }
    }

    #[test]
    fn projection_returns_nearest_valid_state(seed in any::<u64>(), scale in 0.0..2.0f64) {
        let mut r = rng(seed);
        let rho = common::random_density(2, &mut r);
        // Traceless Hermitian perturbation keeps the trace at one.
        let g = common::random_density(2, &mut r);
        let noise = (g.matrix() - CMatrix::identity(4, 4) * C64::new(0.25, 0.0)) * C64::new(scale, 0.0);
        let m = rho.matrix() + noise;
        let proj = project_physical(&m).unwrap();
        assert_state(&proj)?;
        let again = project_physical(proj.matrix()).unwrap();
        prop_assert!(max_abs_diff(again.matrix(), proj.matrix()) < 1e-12);
        let best = frobenius(&m, proj.matrix());
        for _ in 0..8 {
            let other = common::random_density(2, &mut r);
            prop_assert!(best <= frobenius(&m, other.matrix()) + 1e-12);
        }
        prop_assert!(best <= frobenius(&m, rho.matrix()) + 1e-12);
    }

    #[test]
    fn pauli_expansion_reconstructs_the_state(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = common::random_density(2, &mut r);
        let mut m = CMatrix::zeros(4, 4);
        for obs in PauliObservable::all(2) {
            let e = expectation(&rho, &obs).unwrap();
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&e));
            m += obs.matrix() * C64::new(e / 4.0, 0.0);
        }
        prop_assert!(max_abs_diff(&m, rho.matrix()) < 1e-12);
    }

    #[test]
    fn fidelity_is_a_probability(seed in any::<u64>(), theta in -3.2..3.2f64, phi in -3.2..3.2f64) {
        let mut r = rng(seed);
        let rho = common::random_density(2, &mut r);
        let psi = PureState::basis(2, 0)
            .unwrap()
            .apply_unitary(&rx(theta), &[0])
            .unwrap()
            .apply_unitary(&ry(phi), &[1])
            .unwrap();
        let f = fidelity(&rho, &psi).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((fidelity(&psi.to_density(), &psi).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitaries_preserve_purity_and_spectrum(seed in any::<u64>(), theta in -3.2..3.2f64, target in 0usize..3) {
        let mut r = rng(seed);
        let rho = common::random_density(3, &mut r);
        let out = rho.apply_unitary(&rx(theta), &[target]).unwrap();
        assert_state(&out)?;
        prop_assert!((out.purity() - rho.purity()).abs() < 1e-12);
        let mut a = rho.eigenvalues();
        let mut b = out.eigenvalues();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn ghz_states_are_normalized_and_balanced() {
    for n in 1..=10 {
        let g = PureState::ghz(n).unwrap();
        let amps: &CVector = g.amplitudes();
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!((amps[0].norm_sqr() - 0.5).abs() < 1e-12);
        assert!((amps[amps.len() - 1].norm_sqr() - 0.5).abs() < 1e-12);
    }
}
