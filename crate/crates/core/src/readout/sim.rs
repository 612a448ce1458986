use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    optimal_threshold, ConfusionMatrix, PhotonHistogram, QubitState, ReadoutError, ReadoutParams,
    ReadoutPolicy,
};
use crate::rng::{trial_rng, Lane};

const TRIALS_PER_TASK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// The qubit ion itself blocks the readout ion.
    Direct,
    /// A buffer ion blocks the readout ion and is cycled `n_reps` times.
    Buffered,
}

fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("finite positive Poisson mean");
    d.sample(rng) as u64
}

fn decay_time<R: Rng + ?Sized>(rng: &mut R, lifetime: f64) -> f64 {
    let unit: f64 = Exp1.sample(rng);
    if lifetime.is_infinite() {
        f64::INFINITY
    } else {
        unit * lifetime
    }
}

/// Counts from one detection window. When `blocked`, the blocking ion is
/// excited at the window start and the readout ion only fluoresces after it
/// decays. Draw order is fixed: decay time, signal, background.
fn detection_window<R: Rng + ?Sized>(rng: &mut R, params: &ReadoutParams, blocked: bool) -> u64 {
    let t_det = params.t_det;
    let decay = decay_time(rng, params.t1_qubit);
    let lit_time = if blocked {
        (t_det - decay).max(0.0)
    } else {
        t_det
    };
    let signal = poisson(rng, params.signal_rate() * lit_time);
    let background = poisson(rng, params.background_rate * t_det);
    signal + background
}

fn direct_trial(params: &ReadoutParams, prepared: QubitState, seed: u64, trial: u64) -> u64 {
    let mut det = trial_rng(seed, trial, prepared, Lane::Detection);
    detection_window(&mut det, params, prepared == QubitState::Zero)
}

fn buffered_trial(params: &ReadoutParams, prepared: QubitState, seed: u64, trial: u64) -> u64 {
    let mut det = trial_rng(seed, trial, prepared, Lane::Detection);
    let mut ctl = trial_rng(seed, trial, prepared, Lane::Control);
    let p_decay = params.decay_per_rep();
    let mut qubit = prepared;
    let mut total = 0;
    for _ in 0..params.n_reps {
        if qubit == QubitState::One {
            // Excited branch: the qubit sits in |e⟩ while the buffer is pulsed.
            let decayed = ctl.random::<f64>() < p_decay;
            let to_dark = ctl.random::<f64>() < params.decay_branching_to_dark;
            if decayed && to_dark {
                qubit = QubitState::Zero;
            }
        }
        let mut pulse_failed = false;
        for _ in 0..3 {
            pulse_failed |= ctl.random::<f64>() < params.p_transfer_err;
        }
        let buffer_excited = (qubit == QubitState::Zero) ^ pulse_failed;
        total += detection_window(&mut det, params, buffer_excited);
    }
    total
}

fn tally<F>(n_trials: u64, trial: F) -> Vec<u64>
where
    F: Fn(u64) -> u64 + Sync,
{
    let tasks = n_trials.div_ceil(TRIALS_PER_TASK);
    (0..tasks)
        .into_par_iter()
        .map(|task| {
            let start = task * TRIALS_PER_TASK;
            let end = (start + TRIALS_PER_TASK).min(n_trials);
            let mut counts = Vec::new();
            for t in start..end {
                let n = trial(t) as usize;
                if n >= counts.len() {
                    counts.resize(n + 1, 0u64);
                }
                counts[n] += 1;
            }
            counts
        })
        .reduce(Vec::new, |mut a, b| {
            if b.len() > a.len() {
                a.resize(b.len(), 0);
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        })
}

fn check_trials(n_trials: u64) -> Result<(), ReadoutError> {
    if n_trials == 0 {
        Err(ReadoutError::NoTrials)
    } else {
        Ok(())
    }
}

/// Photon statistics when the qubit ion blocks the readout ion directly.
/// A prepared `Zero` is excited and blocks until it decays; `One` is bright.
pub fn simulate_direct(
    params: &ReadoutParams,
    prepared: QubitState,
    n_trials: u64,
    seed: u64,
) -> Result<PhotonHistogram, ReadoutError> {
    params.validate()?;
    check_trials(n_trials)?;
    let counts = tally(n_trials, |t| direct_trial(params, prepared, seed, t));
    PhotonHistogram::from_counts(&counts, prepared)
}

/// Cumulative photon statistics over `n_reps` buffer cycles.
pub fn simulate_buffered(
    params: &ReadoutParams,
    prepared: QubitState,
    n_trials: u64,
    seed: u64,
) -> Result<PhotonHistogram, ReadoutError> {
    params.validate()?;
    check_trials(n_trials)?;
    let counts = tally(n_trials, |t| buffered_trial(params, prepared, seed, t));
    PhotonHistogram::from_counts(&counts, prepared)
}

pub fn simulate(
    params: &ReadoutParams,
    scheme: Scheme,
    prepared: QubitState,
    n_trials: u64,
    seed: u64,
) -> Result<PhotonHistogram, ReadoutError> {
    match scheme {
        Scheme::Direct => simulate_direct(params, prepared, n_trials, seed),
        Scheme::Buffered => simulate_buffered(params, prepared, n_trials, seed),
    }
}

/// Both histograms of one scheme with their optimal decision rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeEvaluation {
    pub scheme: Scheme,
    pub dark: PhotonHistogram,
    pub bright: PhotonHistogram,
    pub policy: ReadoutPolicy,
    pub distinguishability: f64,
    pub confusion: ConfusionMatrix,
}

impl SchemeEvaluation {
    pub fn error(&self) -> f64 {
        1.0 - self.distinguishability
    }
}

pub fn evaluate_scheme(
    params: &ReadoutParams,
    scheme: Scheme,
    n_trials: u64,
    seed: u64,
) -> Result<SchemeEvaluation, ReadoutError> {
    let dark = simulate(params, scheme, QubitState::Zero, n_trials, seed)?;
    let bright = simulate(params, scheme, QubitState::One, n_trials, seed)?;
    let (policy, distinguishability) = optimal_threshold(&dark, &bright)?;
    let confusion = ConfusionMatrix::from_policy(&policy, &dark, &bright);
    Ok(SchemeEvaluation {
        scheme,
        dark,
        bright,
        policy,
        distinguishability,
        confusion,
    })
}

/// Buffered-readout confusion matrix at the optimal threshold.
pub fn confusion_matrix(
    params: &ReadoutParams,
    n_trials: u64,
    seed: u64,
) -> Result<ConfusionMatrix, ReadoutError> {
    Ok(evaluate_scheme(params, Scheme::Buffered, n_trials, seed)?.confusion)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub t_det: f64,
    pub distinguishability: f64,
    pub threshold: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionTimeScan {
    pub scheme: Scheme,
    pub best_t_det: f64,
    pub best_distinguishability: f64,
    pub curve: Vec<ScanPoint>,
}

/// Evaluates every grid point with the same seed and returns the argmax
/// (first on ties) together with the whole curve.
pub fn optimize_detection_time(
    params: &ReadoutParams,
    scheme: Scheme,
    grid: &[f64],
    n_trials: u64,
    seed: u64,
) -> Result<DetectionTimeScan, ReadoutError> {
    if grid.is_empty() {
        return Err(ReadoutError::EmptyGrid);
    }
    let mut curve = Vec::with_capacity(grid.len());
    for &t_det in grid {
        if !(t_det > 0.0) {
            return Err(ReadoutError::invalid(
                "t_det",
                "grid values must be positive",
            ));
        }
        let p = ReadoutParams {
            t_det,
            ..params.clone()
        };
        let eval = evaluate_scheme(&p, scheme, n_trials, seed)?;
        curve.push(ScanPoint {
            t_det,
            distinguishability: eval.distinguishability,
            threshold: eval.policy.threshold,
        });
    }
    let best = curve
        .iter()
        .fold(None::<&ScanPoint>, |acc, p| match acc {
            Some(b) if b.distinguishability >= p.distinguishability => Some(b),
            _ => Some(p),
        })
        .expect("grid is non-empty");
    Ok(DetectionTimeScan {
        scheme,
        best_t_det: best.t_det,
        best_distinguishability: best.distinguishability,
        curve,
    })
}

/// Outcome of [`calibrate_background`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackgroundCalibration {
    pub background_rate: f64,
    pub distinguishability: f64,
    pub target: f64,
}

/// Bisects the background rate until direct readout with `params` reaches
/// `target` distinguishability. Distinguishability decreases with background.
pub fn calibrate_background(
    params: &ReadoutParams,
    target: f64,
    n_trials: u64,
    seed: u64,
) -> Result<BackgroundCalibration, ReadoutError> {
    let eval_at = |bg: f64| -> Result<f64, ReadoutError> {
        let p = ReadoutParams {
            background_rate: bg,
            ..params.clone()
        };
        Ok(evaluate_scheme(&p, Scheme::Direct, n_trials, seed)?.distinguishability)
    };
    let mut lo = 0.0;
    let d_lo = eval_at(lo)?;
    if d_lo <= target {
        return Ok(BackgroundCalibration {
            background_rate: 0.0,
            distinguishability: d_lo,
            target,
        });
    }
    // Grow the bracket until the target is crossed.
    let mut hi = params.signal_rate().max(1.0) * 0.1;
    while eval_at(hi)? > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 * params.signal_rate().max(1.0) {
            return Err(ReadoutError::invalid(
                "background_rate",
                "target distinguishability not reachable",
            ));
        }
    }
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if eval_at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let background_rate = (0.5 * (lo + hi)).round();
    Ok(BackgroundCalibration {
        background_rate,
        distinguishability: eval_at(background_rate)?,
        target,
    })
}
