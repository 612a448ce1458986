use proptest::prelude::*;
use reisim::readout::{
    confusion_matrix, evaluate_scheme, optimal_threshold, simulate, simulate_buffered,
    simulate_direct, PhotonHistogram, QubitState, ReadoutParams, Scheme,
};

fn poisson_pmf(mean: f64, len: usize) -> Vec<f64> {
    let mut p = vec![0.0; len];
    p[0] = (-mean).exp();
    for k in 1..len {
        p[k] = p[k - 1] * mean / k as f64;
    }
    p
}

/// Exact single-window count distribution when the blocking ion is excited
/// at the window start: a Poisson mixture over the exponential decay time,
/// integrated with Simpson's rule.
fn dark_window_pmf(p: &ReadoutParams, len: usize) -> Vec<f64> {
    let (t, t1, s, b) = (p.t_det, p.t1_qubit, p.signal_rate(), p.background_rate);
    let survive = (-t / t1).exp();
    let mut out: Vec<f64> = poisson_pmf(b * t, len)
        .iter()
        .map(|x| x * survive)
        .collect();
    let steps = 4000;
    let h = t / steps as f64;
    for i in 0..=steps {
        let tau = i as f64 * h;
        let w = if i == 0 || i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let density = (-tau / t1).exp() / t1;
        for (o, q) in out.iter_mut().zip(poisson_pmf(s * (t - tau) + b * t, len)) {
            *o += w * h / 3.0 * density * q;
        }
    }
    out
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

#[test]
fn buffered_reduces_to_direct() {
    let p = ReadoutParams {
        n_reps: 1,
        p_transfer_err: 0.0,
        t_excited_per_rep: 0.0,
        ..ReadoutParams::default()
    };
    for state in [QubitState::Zero, QubitState::One] {
        assert_eq!(
            simulate_buffered(&p, state, 20_000, 5).unwrap(),
            simulate_direct(&p, state, 20_000, 5).unwrap()
        );
    }
}

#[test]
fn bright_mean_matches_closed_form() {
    let p = ReadoutParams::default();
    let n = 1_000_000;
    let h = simulate_direct(&p, QubitState::One, n, 21).unwrap();
    let expected = p.bright_window_mean();
    let sigma = (expected / n as f64).sqrt();
    assert!(
        (h.mean() - expected).abs() < 3.0 * sigma,
        "{} vs {expected}",
        h.mean()
    );
}

#[test]
fn dark_histogram_matches_quadrature() {
    let p = ReadoutParams::default();
    let n = 400_000u64;
    let h = simulate_direct(&p, QubitState::Zero, n, 22).unwrap();
    let exact = dark_window_pmf(&p, 60);
    assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    for (k, &q) in exact.iter().enumerate() {
        let sigma = (q * (1.0 - q) / n as f64).sqrt();
        assert!(
            (h.mass(k) - q).abs() <= 4.0 * sigma + 1e-6,
            "bin {k}: {} vs {q}",
            h.mass(k)
        );
    }
}

#[test]
fn leakage_only_confusion_matches_quadrature() {
    let p = ReadoutParams {
        p_transfer_err: 0.0,
        t_excited_per_rep: 0.0,
        background_rate: 0.0,
        ..ReadoutParams::default()
    };
    let len = 200;
    let window = dark_window_pmf(&p, len);
    let mut dark = window.clone();
    for _ in 1..p.n_reps {
        dark = convolve(&dark, &window);
    }
    let bright = poisson_pmf(p.bright_window_mean() * f64::from(p.n_reps), len);
    let h0 = PhotonHistogram::from_masses(normalized(dark), QubitState::Zero).unwrap();
    let h1 = PhotonHistogram::from_masses(normalized(bright), QubitState::One).unwrap();
    let (policy, _) = optimal_threshold(&h0, &h1).unwrap();
    let exact_10 = 1.0 - policy.correct_probability(&h0);
    let exact_01 = 1.0 - policy.correct_probability(&h1);

    let n = 200_000;
    let c = confusion_matrix(&p, n, 23).unwrap();
    for (mc, ex) in [(c.p_read1_given0, exact_10), (c.p_read0_given1, exact_01)] {
        let sigma = (ex * (1.0 - ex) / n as f64).sqrt();
        assert!(
            (mc - ex).abs() <= 3.0 * sigma + 2.0 / n as f64,
            "{mc} vs {ex}"
        );
    }
}

#[test]
fn poisson_threshold_matches_enumeration() {
    let len = 80;
    let h0 =
        PhotonHistogram::from_masses(normalized(poisson_pmf(1.0, len)), QubitState::Zero).unwrap();
    let h1 =
        PhotonHistogram::from_masses(normalized(poisson_pmf(14.0, len)), QubitState::One).unwrap();
    let (policy, d) = optimal_threshold(&h0, &h1).unwrap();
    let cdf = |m: f64, k: usize| -> f64 { normalized(poisson_pmf(m, len))[..k].iter().sum() };
    let (best_k, best_d) = (0..=len)
        .map(|k| (k, 0.5 * (cdf(1.0, k) + 1.0 - cdf(14.0, k))))
        .fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    assert_eq!(policy.threshold, best_k);
    assert_eq!(policy.decide_bright_as, QubitState::One);
    assert!((d - best_d).abs() < 1e-15);
}

#[test]
fn distinguishability_grows_with_repetitions() {
    let n = 50_000u64;
    let mut prev: Option<(f64, f64)> = None;
    for reps in [1, 2, 4, 8, 16] {
        let p = ReadoutParams {
            n_reps: reps,
            t_excited_per_rep: 0.0,
            ..ReadoutParams::default()
        };
        let e = evaluate_scheme(&p, Scheme::Buffered, n, 24).unwrap();
        let c = e.confusion;
        let var = (c.p_read1_given0 * (1.0 - c.p_read1_given0)
            + c.p_read0_given1 * (1.0 - c.p_read0_given1))
            / (4.0 * n as f64);
        if let Some((d_prev, var_prev)) = prev {
            let slack = 3.0 * (var + var_prev).sqrt();
            assert!(e.distinguishability >= d_prev - slack, "n_reps {reps}");
        }
        prev = Some((e.distinguishability, var));
    }
}

#[test]
fn no_decay_no_background_is_nearly_perfect() {
    let base = ReadoutParams::default();
    let p = ReadoutParams {
        t1_qubit: f64::INFINITY,
        background_rate: 0.0,
        t_det: 50.0 * base.tau_eff / base.eta,
        ..base
    };
    let e = evaluate_scheme(&p, Scheme::Buffered, 100_000, 25).unwrap();
    assert!(e.distinguishability > 0.9999, "{}", e.distinguishability);
}

#[test]
fn perfect_detection_limit_has_no_errors() {
    let p = ReadoutParams {
        eta: 1.0,
        background_rate: 0.0,
        t1_qubit: f64::INFINITY,
        p_transfer_err: 0.0,
        ..ReadoutParams::default()
    };
    let c = confusion_matrix(&p, 20_000, 26).unwrap();
    assert_eq!((c.p_read1_given0, c.p_read0_given1), (0.0, 0.0));
}

#[test]
fn dark_and_silent_without_light() {
    let p = ReadoutParams {
        eta: 0.0,
        background_rate: 0.0,
        ..ReadoutParams::default()
    };
    for scheme in [Scheme::Direct, Scheme::Buffered] {
        for state in [QubitState::Zero, QubitState::One] {
            let h = simulate(&p, scheme, state, 1_000, 27).unwrap();
            assert_eq!(h.probabilities(), &[1.0]);
        }
    }
}

#[test]
fn histograms_do_not_depend_on_thread_count() {
    let p = ReadoutParams::default();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| evaluate_scheme(&p, Scheme::Buffered, 30_000, 28).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}

#[test]
fn buffered_errors_come_from_the_excited_branch() {
    let c = confusion_matrix(&ReadoutParams::default(), 100_000, 1).unwrap();
    assert!(c.p_read0_given1 > c.p_read1_given0, "{c:?}");
}

#[test]
fn buffered_beats_direct_by_an_order_of_magnitude() {
    let p = ReadoutParams::default();
    let direct = evaluate_scheme(&p, Scheme::Direct, 100_000, 29).unwrap();
    let buffered = evaluate_scheme(&p, Scheme::Buffered, 100_000, 29).unwrap();
    assert!(buffered.error() * 10.0 <= direct.error());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn histograms_are_normalized(
        eta in 0.0..0.2f64,
        bg in 0.0..2e4f64,
        t_frac in 0.005..0.4f64,
        reps in 1u32..6,
        buffered in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let p = ReadoutParams {
            eta,
            background_rate: bg,
            t_det: t_frac * reisim::readout::EU_T1,
            n_reps: reps,
            ..ReadoutParams::default()
        };
        let scheme = if buffered { Scheme::Buffered } else { Scheme::Direct };
        for state in [QubitState::Zero, QubitState::One] {
            let h = simulate(&p, scheme, state, 500, seed).unwrap();
            prop_assert!((h.total_mass() - 1.0).abs() < 1e-9);
            prop_assert!(h.probabilities().iter().all(|&m| m >= 0.0));
            prop_assert_eq!(h.n_trials(), 500);
        }
    }
}
