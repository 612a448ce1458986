//! Counter-derived random streams.
//!
//! Every Monte Carlo trial owns independent ChaCha streams addressed by
//! `(master seed, trial index, prepared state, lane)`, so results do not
//! depend on how trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::readout::QubitState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lane {
    /// Photon-counting draws (decay times, Poisson counts).
    Detection,
    /// Pulse failures and qubit decays during buffer cycling.
    Control,
}

pub fn trial_rng(seed: u64, trial: u64, prepared: QubitState, lane: Lane) -> ChaCha8Rng {
    let lane_bit = match lane {
        Lane::Detection => 0,
        Lane::Control => 1,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 2) | ((prepared.index() as u64) << 1) | lane_bit);
    rng
}

/// Generator for a whole instance (crystal, graph, shots) keyed by seed.
pub fn instance_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
