//! Photon-counting Monte Carlo for direct and buffered single-ion readout,
//! threshold and detection-time optimization, and readout confusion.

mod histogram;
mod params;
mod sim;

pub use histogram::{
    optimal_threshold, ConfusionMatrix, PhotonHistogram, ReadoutPolicy, HISTOGRAM_CSV_HEADER,
};
pub use params::{QubitState, ReadoutParams, CALIBRATED_BACKGROUND_RATE, EU_T1};
pub use sim::{
    calibrate_background, confusion_matrix, evaluate_scheme, optimize_detection_time, simulate,
    simulate_buffered, simulate_direct, BackgroundCalibration, DetectionTimeScan, ScanPoint,
    Scheme, SchemeEvaluation,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReadoutError {
    #[error("invalid readout parameter `{name}`: {reason}")]
    InvalidParam {
        name: &'static str,
        reason: &'static str,
    },
    #[error("histogram has no mass")]
    EmptyHistogram,
    #[error("at least one trial is required")]
    NoTrials,
    #[error("detection-time grid is empty")]
    EmptyGrid,
    #[error("threshold optimization needs one histogram per prepared state")]
    MismatchedHistograms,
}

impl ReadoutError {
    pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Self {
        ReadoutError::InvalidParam { name, reason }
    }
}
