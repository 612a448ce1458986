use reisim::chain::{
    build_graph, calibrate_cutoff, discover_chain, generate_crystal, mean_qubit_degree, ChainError,
    Coupling, CutoffCalibration, Species,
};
use reisim::gate::{bell_fidelity, run_cnot_sequence, ErrorBudget, RotationAxis, TraceEntry};
use reisim::readout::{
    calibrate_background, evaluate_scheme, optimize_detection_time, BackgroundCalibration,
    ConfusionMatrix, DetectionTimeScan, ReadoutParams, ReadoutPolicy, Scheme, SchemeEvaluation,
    HISTOGRAM_CSV_HEADER,
};
use reisim::scaling::{ghz_fidelity_curve, GHZ_CSV_HEADER};
use reisim::tomography::{run_tomography, TomographyResult};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::OutputDir;
use crate::CliError;

fn model<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Model(e.to_string())
}

#[derive(Serialize)]
struct SchemeSummary {
    scheme: Scheme,
    distinguishability: f64,
    policy: ReadoutPolicy,
    confusion: ConfusionMatrix,
    t_det: f64,
    n_reps: u32,
    eta: f64,
}

impl SchemeSummary {
    fn new(eval: &SchemeEvaluation, params: &ReadoutParams) -> Self {
        Self {
            scheme: eval.scheme,
            distinguishability: eval.distinguishability,
            policy: eval.policy,
            confusion: eval.confusion,
            t_det: params.t_det,
            n_reps: params.n_reps,
            eta: params.eta,
        }
    }
}

#[derive(Serialize)]
struct ReadoutSummary {
    trials: u64,
    direct: SchemeSummary,
    buffered: SchemeSummary,
    buffered_high_efficiency: SchemeSummary,
    detection_time_scan_baseline: DetectionTimeScan,
    detection_time_scan_high_efficiency: DetectionTimeScan,
}

fn histogram_rows(eval: &SchemeEvaluation) -> Vec<String> {
    eval.dark.csv_rows().chain(eval.bright.csv_rows()).collect()
}

pub fn readout(config: &ExperimentConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let seed = config.run.seed;
    let trials = config.run.trials;
    let base = &config.readout.baseline;
    let high = &config.readout.high_efficiency;

    let direct = evaluate_scheme(base, Scheme::Direct, trials, seed).map_err(model)?;
    let buffered = evaluate_scheme(base, Scheme::Buffered, trials, seed).map_err(model)?;
    let buffered_high = evaluate_scheme(high, Scheme::Buffered, trials, seed).map_err(model)?;

    let grid = |p: &ReadoutParams| -> Vec<f64> {
        config
            .readout
            .scan_fractions
            .iter()
            .map(|f| f * p.t1_qubit)
            .collect()
    };
    let scan_base =
        optimize_detection_time(base, Scheme::Direct, &grid(base), trials, seed).map_err(model)?;
    let scan_high =
        optimize_detection_time(high, Scheme::Direct, &grid(high), trials, seed).map_err(model)?;

    out.csv(
        "histograms_direct.csv",
        HISTOGRAM_CSV_HEADER,
        histogram_rows(&direct),
    )?;
    out.csv(
        "histograms_buffered.csv",
        HISTOGRAM_CSV_HEADER,
        histogram_rows(&buffered),
    )?;
    out.csv(
        "histograms_buffered_high_efficiency.csv",
        HISTOGRAM_CSV_HEADER,
        histogram_rows(&buffered_high),
    )?;
    out.json(
        "readout_summary.json",
        &ReadoutSummary {
            trials,
            direct: SchemeSummary::new(&direct, base),
            buffered: SchemeSummary::new(&buffered, base),
            buffered_high_efficiency: SchemeSummary::new(&buffered_high, high),
            detection_time_scan_baseline: scan_base,
            detection_time_scan_high_efficiency: scan_high,
        },
    )
}

#[derive(Serialize)]
struct TraceExport<'a> {
    entries: &'a [TraceEntry],
}

#[derive(Serialize)]
struct CnotSummary {
    rotation_axis: RotationAxis,
    fidelity: f64,
    infidelity: f64,
    purity: f64,
    budget: ErrorBudget,
}

pub fn cnot(config: &ExperimentConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let (rho, trace) = run_cnot_sequence(&config.gate).map_err(model)?;
    let fidelity = bell_fidelity(&rho, config.gate.rotation_axis).map_err(model)?;
    let m = rho.matrix();
    let rows = (0..m.nrows()).flat_map(|i| {
        (0..m.ncols()).map(move |j| format!("{i},{j},{},{}", m[(i, j)].re, m[(i, j)].im))
    });
    out.csv("rho_f.csv", "row,col,real,imag", rows)?;
    out.json(
        "sequence_trace.json",
        &TraceExport {
            entries: &trace.entries,
        },
    )?;
    out.json(
        "cnot_summary.json",
        &CnotSummary {
            rotation_axis: config.gate.rotation_axis,
            fidelity,
            infidelity: 1.0 - fidelity,
            purity: rho.purity(),
            budget: ErrorBudget::from_trace(&trace),
        },
    )
}

#[derive(Serialize)]
struct TomographyExport<'a> {
    fidelity_without_readout: f64,
    total_error: f64,
    #[serde(flatten)]
    result: &'a TomographyResult,
}

pub fn tomo(config: &ExperimentConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let axis = config.gate.rotation_axis;
    let (rho, _) = run_cnot_sequence(&config.gate).map_err(model)?;
    let fidelity_without_readout = bell_fidelity(&rho, axis).map_err(model)?;
    let result = run_tomography(
        &rho,
        &axis.target_state(),
        &config.tomography,
        config.run.seed,
    )
    .map_err(model)?;
    out.json(
        "tomography.json",
        &TomographyExport {
            fidelity_without_readout,
            total_error: 1.0 - result.fidelity_with_readout,
            result: &result,
        },
    )
}

pub fn ghz(config: &ExperimentConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let budget = ErrorBudget::from_params(&config.gate).map_err(model)?;
    let rows = ghz_fidelity_curve(&budget, &config.scaling).map_err(model)?;
    out.csv("ghz.csv", GHZ_CSV_HEADER, rows.iter().map(|r| r.csv_row()))
}

#[derive(Serialize)]
struct DegreeStats {
    seed: u64,
    qubits: usize,
    readout_ions: usize,
    edges: usize,
    mean_qubit_degree: f64,
    /// `degree_histogram[k]` qubits have `k` qubit neighbors.
    degree_histogram: Vec<usize>,
    ensemble_size: usize,
    ensemble_mean_degree: f64,
    ensemble_std_degree: f64,
}

pub fn chain(config: &ExperimentConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let seed = config.run.seed;
    let crystal = generate_crystal(&config.crystal, seed).map_err(model)?;
    let graph = build_graph(&crystal, &config.coupling).map_err(model)?;

    let degrees = graph.qubit_degrees();
    let mut histogram = vec![0usize; degrees.iter().max().map_or(0, |m| m + 1)];
    for &d in &degrees {
        histogram[d] += 1;
    }
    let ensemble: Vec<f64> = (0..config.chain.ensemble as u64)
        .map(|k| {
            let c = generate_crystal(&config.crystal, seed.wrapping_add(k))?;
            Ok(mean_qubit_degree(&build_graph(&c, &config.coupling)?))
        })
        .collect::<Result<_, ChainError>>()
        .map_err(model)?;
    let n = ensemble.len().max(1) as f64;
    let mean = ensemble.iter().sum::<f64>() / n;
    let var = ensemble.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;

    out.json("graph.json", &graph)?;
    out.json(
        "degree_stats.json",
        &DegreeStats {
            seed,
            qubits: crystal.count(Species::Qubit),
            readout_ions: crystal.count(Species::Readout),
            edges: graph.edges().len(),
            mean_qubit_degree: mean_qubit_degree(&graph),
            degree_histogram: histogram,
            ensemble_size: ensemble.len(),
            ensemble_mean_degree: mean,
            ensemble_std_degree: var.sqrt(),
        },
    )?;
    match discover_chain(&graph, config.chain.target_length, seed) {
        Ok(plan) => out.json("chain_plan.json", &plan),
        Err(e @ (ChainError::NotFound { .. } | ChainError::NoReadout)) => {
            Err(CliError::Infeasible(e.to_string()))
        }
        Err(e) => Err(model(e)),
    }
}

#[derive(Serialize)]
struct CalibrationReport {
    background: BackgroundCalibration,
    cutoff: CutoffCalibration,
}

/// Calibrates with the effective `config` and writes `source` (the config
/// file as loaded, without flag overrides) with the calibrated values.
pub fn calibrate(
    config: &ExperimentConfig,
    source: &ExperimentConfig,
    out: &mut OutputDir,
) -> Result<(), CliError> {
    let background = calibrate_background(
        &config.readout.baseline,
        config.readout.calibration_target,
        config.run.trials,
        config.run.seed,
    )
    .map_err(model)?;
    let cutoff = calibrate_cutoff(
        &config.crystal,
        config.coupling.c_dipole,
        config.chain.calibration_target_degree,
        config.chain.calibration_crystals,
        config.chain.calibration_seed,
    )
    .map_err(model)?;

    let mut frozen = source.clone();
    frozen.readout.baseline.background_rate = background.background_rate;
    frozen.readout.high_efficiency.background_rate = background.background_rate;
    frozen.coupling = Coupling {
        c_dipole: cutoff.c_dipole,
        cutoff: cutoff.cutoff,
    };
    let text = format!("{}{}", out.comment_header(), frozen.to_toml());
    out.text("calibrated.toml", text)?;
    out.json(
        "calibration.json",
        &CalibrationReport { background, cutoff },
    )
}
